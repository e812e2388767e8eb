"""Tests for image, CSV, model, spectrogram and network file formats."""

from pathlib import Path

import numpy as np
import pytest

from memfactor.factors import HiddenDomain, MemoryTable, SubspaceFactor
from memfactor.graph import ComplexKind, Network, NetworkBuilder
from memfactor.io.csvio import decode_csv_matrix, encode_csv_matrix, read_labels, write_csv_rows, write_labels
from memfactor.io.images import (
    ImageBuffer,
    decode_image,
    encode_image,
    gray_of_rgb,
    match_gray,
    read_image,
    write_image,
)
from memfactor.io.models import MANIFEST_NAME, decode_payload, encode_payload, load_manifest, load_model, save_model
from memfactor.io.network_json import load_network, save_network
from memfactor.io.spectrogram import decode_spectrogram, encode_spectrogram
from memfactor.signal import log_bin
from memfactor.validation import (
    ChecksumError,
    ImageHeaderError,
    ImageMaxvalError,
    ImageTruncatedError,
    ModelFormatError,
    RaggedCsvError,
    ValidationError,
)


class TestColor:
    def test_gray_of_pure_red(self) -> None:
        assert float(gray_of_rgb(1.0, 0.0, 0.0)) == pytest.approx(0.212673)

    def test_gray_coefficients_sum_to_one(self) -> None:
        assert float(gray_of_rgb(1.0, 1.0, 1.0)) == pytest.approx(1.0)

    def test_match_gray_scales_pixel(self) -> None:
        rgb = np.array([[[0.5, 0.5, 0.5]]])
        out = match_gray(rgb, np.array([[0.25]]))
        np.testing.assert_allclose(out, [[[0.25, 0.25, 0.25]]])

    def test_match_gray_dark_pixel(self) -> None:
        out = match_gray(np.zeros((1, 1, 3)), np.array([[0.3]]))
        np.testing.assert_allclose(out, [[[0.3, 0.3, 0.3]]])

    def test_from_floats_clamps_and_rounds(self) -> None:
        buf = ImageBuffer.from_floats(np.array([[0.5, 1.2, -0.1]]))
        assert buf.data[0, :, 0].tolist() == [128, 255, 0]

    def test_gray_channel_of_four_channel_buffer(self) -> None:
        data = np.zeros((1, 1, 4), dtype=np.uint8)
        data[0, 0, 3] = 77
        assert ImageBuffer(data).gray().data[0, 0, 0] == 77


class TestImages:
    """Tests for PPM/PGM decoding and encoding."""

    @pytest.mark.parametrize("fmt", ["binary", "ascii"], ids=["binary", "ascii"])
    @pytest.mark.parametrize("channels", [1, 3], ids=["pgm", "ppm"])
    def test_round_trip(self, rng: np.random.Generator, fmt: str, channels: int) -> None:
        buf = ImageBuffer(rng.integers(0, 256, size=(3, 5, channels), dtype=np.uint8))
        back = decode_image(encode_image(buf, fmt))  # type: ignore[arg-type]
        np.testing.assert_array_equal(back.data, buf.data)

    def test_header_comments(self) -> None:
        buf = decode_image(b"P2\n# written by hand\n2 1\n255\n0 255\n")
        assert buf.data[0, :, 0].tolist() == [0, 255]

    def test_file_round_trip(self, tmp_path: Path) -> None:
        buf = ImageBuffer(np.full((2, 2, 3), 9, dtype=np.uint8))
        path = write_image(tmp_path / "sub" / "img.ppm", buf)
        np.testing.assert_array_equal(read_image(path).data, buf.data)

    @pytest.mark.parametrize(
        "raw,error",
        [
            (b"P7\n2 2\n255\n", ImageHeaderError),
            (b"P5\n2\n", ImageHeaderError),
            (b"P5\nx 2\n255\n", ImageHeaderError),
            (b"P5\n2 2\n65535\n" + bytes(8), ImageMaxvalError),
            (b"P5\n2 2\n255\n\x00\x01", ImageTruncatedError),
            (b"P2\n2 2\n255\n1 2 3\n", ImageTruncatedError),
            (b"P2\n1 1\n255\n300\n", ImageHeaderError),
        ],
        ids=["magic", "incomplete", "non-numeric", "maxval", "truncated-binary", "truncated-ascii", "out-of-range"],
    )
    def test_decode_errors(self, raw: bytes, error: type[Exception]) -> None:
        with pytest.raises(error):
            decode_image(raw)

    def test_four_channels_not_writable(self) -> None:
        buf = ImageBuffer(np.zeros((1, 1, 4), dtype=np.uint8))
        with pytest.raises(ValidationError, match="4-channel"):
            encode_image(buf)

    def test_rejects_float_buffer(self) -> None:
        with pytest.raises(ValidationError):
            ImageBuffer(np.zeros((1, 1, 3)))


class TestCsv:
    def test_full_precision(self) -> None:
        matrix = np.array([[0.1, 1 / 3], [2.5e-300, -7.0]])
        np.testing.assert_array_equal(decode_csv_matrix(encode_csv_matrix(matrix)), matrix)

    def test_header_skipped(self) -> None:
        text = encode_csv_matrix(np.ones((2, 2)), header=["a", "b"])
        assert text.splitlines()[0] == "a,b"
        assert decode_csv_matrix(text, has_header=True).shape == (2, 2)

    @pytest.mark.parametrize(
        "text,match",
        [("1,2\n3\n", "row 2"), ("1,x\n", "non-numeric"), ("", "no data")],
        ids=["ragged", "non-numeric", "empty"],
    )
    def test_errors(self, text: str, match: str) -> None:
        with pytest.raises(RaggedCsvError, match=match):
            decode_csv_matrix(text)

    def test_labels(self, tmp_path: Path) -> None:
        path = write_labels(tmp_path / "labels.csv", [("a.pgm", 3), ("b.pgm", 0)])
        assert read_labels(path) == {"a.pgm": 3, "b.pgm": 0}

    @pytest.mark.parametrize("text", ["a.pgm,1,2\n", "a.pgm,seven\n"], ids=["cells", "label"])
    def test_bad_labels(self, tmp_path: Path, text: str) -> None:
        path = tmp_path / "labels.csv"
        path.write_text(text)
        with pytest.raises(RaggedCsvError):
            read_labels(path)

    def test_mixed_rows(self, tmp_path: Path) -> None:
        path = write_csv_rows(tmp_path / "m.csv", ["metric", "value"], [("mse", 0.5), ("iterations", 3)])
        assert path.read_text().splitlines() == ["metric,value", "mse,0.5", "iterations,3"]


class TestPayloadFiles:
    """Tests for binary payload encoding."""

    def test_table(self) -> None:
        table = MemoryTable([[1.0, 2.0], [3.0, 4.0]])
        back = decode_payload(encode_payload(table))
        assert isinstance(back, MemoryTable)
        np.testing.assert_array_equal(back.rows, table.rows)

    @pytest.mark.parametrize("domain", list(HiddenDomain), ids=lambda d: d.value)
    def test_subspace_keeps_domain(self, domain: HiddenDomain) -> None:
        W = np.array([[1.0, 0.0], [0.5, 2.0], [0.0, 1.0]])
        if domain is HiddenDomain.COMPLEX:
            W = W + 1j * np.eye(3, 2)
        back = decode_payload(encode_payload(SubspaceFactor(W, domain)))
        assert isinstance(back, SubspaceFactor)
        assert back.domain is domain
        np.testing.assert_array_equal(back.W, W)

    def test_checksum(self) -> None:
        raw = bytearray(encode_payload(MemoryTable([[1.0, 2.0]])))
        raw[20] ^= 0x01
        with pytest.raises(ChecksumError):
            decode_payload(bytes(raw))

    @pytest.mark.parametrize(
        "mangle",
        [lambda raw: b"XXXX" + raw[4:], lambda raw: raw[:-1], lambda raw: raw[:10]],
        ids=["magic", "length", "short"],
    )
    def test_format_errors(self, mangle) -> None:
        raw = encode_payload(MemoryTable([[1.0, 2.0]]))
        with pytest.raises(ModelFormatError):
            decode_payload(mangle(raw))


class TestModelDirectory:
    """Tests for save_model() / load_model()."""

    def test_shared_payload_written_once(self, tmp_path: Path) -> None:
        table = MemoryTable([[1.0, 2.0]])
        manifest = save_model(tmp_path, {"a": table, "b": table}, task="music_gap", layout={"kind": "spectrogram"})
        assert manifest.payloads["a"].file == manifest.payloads["b"].file
        assert len(list(tmp_path.glob("*.mfnt"))) == 1

        payloads, loaded = load_model(tmp_path)
        assert payloads["a"] is payloads["b"]
        assert loaded.layout == {"kind": "spectrogram"}
        assert loaded.task == "music_gap"

    def test_mixed_payloads(self, tmp_path: Path) -> None:
        payloads = {
            "t": MemoryTable([[1.0, 2.0, 3.0]]),
            "w": SubspaceFactor(np.ones((3, 1)), HiddenDomain.NONNEG),
        }
        save_model(tmp_path, payloads, task="inpaint", trainer="nmf", residuals={"w": 0.25})
        loaded, manifest = load_model(tmp_path)
        assert isinstance(loaded["t"], MemoryTable)
        assert isinstance(loaded["w"], SubspaceFactor)
        assert manifest.payloads["w"].residual == 0.25
        assert manifest.payloads["w"].kind == "subspace"

    def test_corrupt_payload(self, tmp_path: Path) -> None:
        save_model(tmp_path, {"t": MemoryTable([[1.0, 2.0]])}, task="inpaint")
        path = next(tmp_path.glob("*.mfnt"))
        raw = bytearray(path.read_bytes())
        raw[-5] ^= 0xFF
        path.write_bytes(bytes(raw))
        with pytest.raises(ChecksumError):
            load_model(tmp_path)

    @pytest.mark.parametrize(
        "text",
        ['{"task": "inpaint", "bogus": 1}', "not json", '{"task": "inpaint", "version": 9}'],
        ids=["unknown-key", "not-json", "version"],
    )
    def test_bad_manifest(self, tmp_path: Path, text: str) -> None:
        (tmp_path / MANIFEST_NAME).write_text(text)
        with pytest.raises(ModelFormatError):
            load_manifest(tmp_path)


class TestSpectrogramFile:
    def test_round_trip(self, rng: np.random.Generator) -> None:
        matrix = rng.normal(size=(30, 5)) + 1j * rng.normal(size=(30, 5))
        spec = log_bin(matrix, n_bins=6, sample_rate=16000)
        back = decode_spectrogram(encode_spectrogram(spec))
        assert back.metadata() == spec.metadata()
        np.testing.assert_array_equal(back.values, spec.values)

    def test_checksum(self) -> None:
        raw = bytearray(encode_spectrogram(log_bin(np.ones((10, 2)), n_bins=2)))
        raw[-6] ^= 0x01
        with pytest.raises(ChecksumError):
            decode_spectrogram(bytes(raw))

    def test_bad_magic(self) -> None:
        raw = encode_spectrogram(log_bin(np.ones((10, 2)), n_bins=2))
        with pytest.raises(ModelFormatError, match="magic"):
            decode_spectrogram(b"MFNT" + raw[4:])


class TestNetworkDocument:
    """Tests for save_network() / load_network()."""

    def test_round_trip(self, chain_network: Network, tmp_path: Path) -> None:
        net = load_network(save_network(tmp_path / "net.json", chain_network))
        assert net.n_variables == chain_network.n_variables
        assert [f.neighbors for f in net.factors] == [f.neighbors for f in chain_network.factors]
        assert [f.weights for f in net.factors] == [f.weights for f in chain_network.factors]
        assert net.evidence_ids == chain_network.evidence_ids
        evidence = net.factors[net.evidence_ids[0]].payload
        assert isinstance(evidence, MemoryTable)
        assert evidence.rows[0, 0] == 1.0

    def test_complex_evidence(self, tmp_path: Path) -> None:
        b = NetworkBuilder()
        v = b.add_variable(ComplexKind())
        b.add_evidence(v, 1.5 - 2.0j)
        net = load_network(save_network(tmp_path / "net.json", b.build()))
        evidence = net.factors[0].payload
        assert isinstance(evidence, MemoryTable)
        assert evidence.rows[0, 0] == 1.5 - 2.0j

    def test_unknown_key(self, tmp_path: Path) -> None:
        path = tmp_path / "net.json"
        path.write_text('{"variables": [], "factors": [], "extra": 1}')
        with pytest.raises(ModelFormatError, match="extra"):
            load_network(path)
