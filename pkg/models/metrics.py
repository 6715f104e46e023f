# models/metrics.py
from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np


@dataclass
class Metrics:
    """Per-class and per-region Dice / sensitivity, every value in [0, 1]"""
    dice: List[float]
    sensitivity: List[float]
    regions: Dict[str, Dict[str, float]] = field(default_factory=dict)

    @property
    def num_classes(self) -> int:
        return len(self.dice)

    @classmethod
    def mean(cls, items: List["Metrics"]) -> "Metrics":
        """Sample mean, reduced in list order"""
        if not items:
            raise ValueError("cannot average an empty list of metrics")
        dice = np.mean([m.dice for m in items], axis=0).tolist()
        sensitivity = np.mean([m.sensitivity for m in items], axis=0).tolist()
        regions = {
            region: {
                metric: float(np.mean([m.regions[region][metric] for m in items]))
                for metric in items[0].regions[region]
            }
            for region in items[0].regions
        }
        return cls(dice, sensitivity, regions)

    def to_dict(self) -> Dict:
        return {"dice": list(self.dice), "sensitivity": list(self.sensitivity), "regions": self.regions}

    @classmethod
    def from_dict(cls, data: Dict) -> "Metrics":
        return cls(
            dice=[float(v) for v in data["dice"]],
            sensitivity=[float(v) for v in data["sensitivity"]],
            regions={name: {k: float(v) for k, v in values.items()} for name, values in data.get("regions", {}).items()},
        )
