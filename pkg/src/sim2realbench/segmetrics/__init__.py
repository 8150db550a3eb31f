from .confusion import ConfusionMatrix, SegEvalError, accumulate_confusion, miou
from .panoptic import (
    INSTANCE_FACTOR,
    VOID_ID,
    InstanceMap,
    PanopticResult,
    PQStat,
    accumulate_pq,
    panoptic_quality,
    pq_from_stats,
)
from .instances import (
    InstancePrediction,
    decode_rle,
    encode_rle,
    gt_instances,
    instance_ap,
    load_predictions,
)

__all__ = [
    "ConfusionMatrix",
    "SegEvalError",
    "accumulate_confusion",
    "miou",
    "INSTANCE_FACTOR",
    "VOID_ID",
    "InstanceMap",
    "PanopticResult",
    "PQStat",
    "accumulate_pq",
    "panoptic_quality",
    "pq_from_stats",
    "InstancePrediction",
    "decode_rle",
    "encode_rle",
    "gt_instances",
    "instance_ap",
    "load_predictions",
]
