from __future__ import annotations

import enum
from dataclasses import dataclass


class Metric(enum.Enum):
    PSNR = "psnr"
    SSIM = "ssim"
    MS_SSIM = "ms_ssim"
    CW_SSIM = "cw_ssim"
    FSIM = "fsim"
    LPIPS = "lpips"


# direction of "better" for each full-reference metric
HIGHER_BETTER = {
    Metric.PSNR: True,
    Metric.SSIM: True,
    Metric.MS_SSIM: True,
    Metric.CW_SSIM: True,
    Metric.FSIM: True,
    Metric.LPIPS: False,
}


@dataclass(frozen=True)
class FRScore:
    metric: Metric
    value: float

    @property
    def higher_better(self) -> bool:
        return HIGHER_BETTER[self.metric]
