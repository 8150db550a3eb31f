from .manifest import DatasetManifest, ManifestEntry, ManifestError
from .sampling import Xorshift64Star, sample_shift
from .assemble import assemble
from .report import MetricReport, ReportError, emit_report
from .runner import IQA_METRICS, ModelFileMissing, run_iqa, run_seg_eval

__all__ = [
    "DatasetManifest",
    "ManifestEntry",
    "ManifestError",
    "Xorshift64Star",
    "sample_shift",
    "assemble",
    "MetricReport",
    "ReportError",
    "emit_report",
    "IQA_METRICS",
    "ModelFileMissing",
    "run_iqa",
    "run_seg_eval",
]
