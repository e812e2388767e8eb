"""Tests for memfactor."""
