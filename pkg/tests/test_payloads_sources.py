"""Test payload codecs and sample sources."""

import struct

import numpy as np
import pytest

from edge_learning_sim.apps import (
    ControlCode,
    CsvFile,
    TwoGaussians,
    Xor,
    build_source,
    decode_control,
    decode_model_result,
    decode_request,
    decode_sample,
    encode_control,
    encode_model_result,
    encode_request,
    encode_sample,
)
from edge_learning_sim.core.exceptions import ConfigurationError, PayloadError
from edge_learning_sim.core.rng import RandomStream
from edge_learning_sim.learning import Split, build_mlp, parameters_digest
from edge_learning_sim.models import DatasetKind, DatasetSpec


class TestPayloads:
    """Test the wire codecs."""

    def test_sample_layout(self):
        """Test the little-endian sample encoding."""
        payload = encode_sample((4 << 32) | 2, [1.5, -2.0], [0.0, 1.0])

        assert payload[:16] == struct.pack("<QII", (4 << 32) | 2, 2, 2)
        assert len(payload) == 16 + 4 * 8
        sample = decode_sample(payload)
        assert sample.sample_id == (4 << 32) | 2
        np.testing.assert_array_equal(sample.inputs, [1.5, -2.0])
        np.testing.assert_array_equal(sample.targets, [0.0, 1.0])

    @pytest.mark.parametrize(
        "payload",
        [b"", struct.pack("<QII", 1, 2, 2) + bytes(8), struct.pack("<QII", 1, 0, 1) + bytes(8)],
    )
    def test_bad_samples(self, payload):
        """Test short, inconsistent and empty samples."""
        with pytest.raises(PayloadError):
            decode_sample(payload)

    def test_request_and_control(self):
        """Test the fixed-size messages and their errors."""
        assert decode_request(encode_request(42)) == 42
        assert decode_control(encode_control(ControlCode.REPLY_END, 3)) == (ControlCode.REPLY_END, 3)
        with pytest.raises(PayloadError):
            decode_request(b"\x01")
        with pytest.raises(PayloadError):
            decode_control(struct.pack("<BI", 9, 0))

    def test_model_result(self):
        """Test summary and network recovery."""
        net = build_mlp(2, [3], 2, probabilistic=True, stream=RandomStream("model/init", 1))

        summary, decoded = decode_model_result(encode_model_result(net, {"node": 2, "samples": 9}))

        assert summary == {"node": 2, "samples": 9}
        assert parameters_digest(decoded) == parameters_digest(net)

    def test_model_result_bad_summary(self):
        """Test a summary that is not a JSON object."""
        payload = struct.pack("<I", 2) + b"[]"

        with pytest.raises(PayloadError):
            decode_model_result(payload)


class TestSources:
    """Test labeled sample sources."""

    def test_two_gaussians_centres(self):
        """Test class means at -separation/2 and +separation/2."""
        source = TwoGaussians(features=3, classes=2, separation=4.0, spread=0.5)
        data = source.dataset(RandomStream("data/evaluation", 1), 4000)
        labels = data.targets().argmax(axis=1)
        inputs = data.inputs()

        assert data.count(Split.TEST) == 4000
        assert inputs.shape == (4000, 3)
        np.testing.assert_allclose(inputs[labels == 0].mean(axis=0), [-2.0] * 3, atol=0.1)
        np.testing.assert_allclose(inputs[labels == 1].mean(axis=0), [2.0] * 3, atol=0.1)

    def test_xor_labels(self):
        """Test that noiseless XOR points are labeled by quadrant."""
        stream = RandomStream("xor", 3)
        source = Xor(noise=0.0)
        for _ in range(200):
            x, target = source.sample(stream)
            assert target.argmax() == int((x[0] > 0) != (x[1] > 0))

    def test_csv_file(self, tmp_path):
        """Test loading features and labels from a file."""
        path = tmp_path / "data.csv"
        path.write_text("0.5,1.0,0\n-0.5,2.0,1\n1.5,3.0,2\n", encoding="utf-8")
        source = CsvFile(path, classes=3)

        x, target = source.sample(RandomStream("data/node4", 1))

        assert len(source) == 3
        assert source.features == 2
        assert x.shape == (2,) and target.shape == (3,)
        row = [list(r) for r in source.inputs].index(list(x))
        assert target.argmax() == source.labels[row]

    @pytest.mark.parametrize("content", ["0.5,1.0,3\n", "0.5,1.0,0.5\n", "1\n"])
    def test_csv_rejects_bad_labels(self, tmp_path, content):
        """Test label range, integrality and column count."""
        path = tmp_path / "data.csv"
        path.write_text(content, encoding="utf-8")

        with pytest.raises(ConfigurationError):
            CsvFile(path, classes=3)

    def test_csv_missing_file(self, tmp_path):
        """Test an unreadable path."""
        with pytest.raises(ConfigurationError):
            CsvFile(tmp_path / "missing.csv", classes=2)

    def test_build_source(self, tmp_path):
        """Test source selection from a dataset spec."""
        path = tmp_path / "data.csv"
        path.write_text("0.5,1.0,0\n", encoding="utf-8")

        assert isinstance(build_source(DatasetSpec()), TwoGaussians)
        assert isinstance(build_source(DatasetSpec(kind=DatasetKind.XOR)), Xor)
        assert isinstance(build_source(DatasetSpec(kind=DatasetKind.FILE, path=path, features=2)), CsvFile)
        with pytest.raises(ConfigurationError):
            build_source(DatasetSpec(kind=DatasetKind.FILE, path=path, features=3))
