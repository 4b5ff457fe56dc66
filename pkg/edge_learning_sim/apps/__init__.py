"""Learning applications: terminal generators, edge trainers and the center aggregator."""

from .aggregator import EnsembleAggregatorApp, SubModel
from .generator import DataGeneratorApp, sample_id
from .payloads import (
    ControlCode,
    Sample,
    decode_control,
    decode_model_result,
    decode_request,
    decode_sample,
    encode_control,
    encode_model_result,
    encode_request,
    encode_sample,
)
from .sources import CsvFile, SampleSource, TwoGaussians, Xor, build_source, one_hot
from .training import Sufficiency, TrainingApp

__all__ = [
    "ControlCode",
    "CsvFile",
    "DataGeneratorApp",
    "EnsembleAggregatorApp",
    "Sample",
    "SampleSource",
    "SubModel",
    "Sufficiency",
    "TrainingApp",
    "TwoGaussians",
    "Xor",
    "build_source",
    "decode_control",
    "decode_model_result",
    "decode_request",
    "decode_sample",
    "encode_control",
    "encode_model_result",
    "encode_request",
    "encode_sample",
    "one_hot",
    "sample_id",
]
