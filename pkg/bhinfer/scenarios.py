from __future__ import annotations

import math
from collections.abc import Iterator
from dataclasses import dataclass
from pathlib import Path

import yaml

from bhinfer.lifetime import GammaLifetime
from bhinfer.spectral import Regime, malthusian_alpha

__all__ = ["Scenario", "ScenarioContainer", "Scenarios"]


@dataclass(frozen=True)
class Scenario:
    """A reference simulation setup with its expected regime and acceptance tolerances."""

    name: str
    k: float
    theta: float
    regime: Regime
    category: str
    mu_tol: float | None = None
    cv_tol: float | None = None
    sigma_tol: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "regime", Regime(self.regime))

    @property
    def law(self) -> GammaLifetime:
        return GammaLifetime(self.k, self.theta)

    @property
    def alpha(self) -> float:
        return malthusian_alpha(self.law)

    @property
    def grid_step(self) -> float:
        """Observation step ``log2 / (8 alpha)`` used for the reference datasets."""
        return math.log(2) / (8 * self.alpha)

    def __str__(self) -> str:
        return self.name


@dataclass
class ScenarioContainer:
    scenarios: dict[str, Scenario]

    def __iter__(self) -> Iterator:
        yield from self.scenarios.values()

    def __len__(self) -> int:
        return len(self.scenarios)

    def __getitem__(self, key) -> Scenario:
        if isinstance(key, Scenario):
            key = key.name
        try:
            return self.scenarios[key]
        except KeyError as e:
            raise KeyError(f"Scenario '{key}' not found") from e

    def __getattr__(self, name) -> Scenario:
        if name.startswith("__") or name == "scenarios":
            raise AttributeError(name)
        return self[name]

    def __contains__(self, scenario: str | Scenario) -> bool:
        if isinstance(scenario, Scenario):
            scenario = scenario.name
        return scenario in self.scenarios

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}({', '.join([s.name for s in self])})"

    @property
    def categories(self) -> list[str]:
        return list(dict.fromkeys(s.category for s in self))

    def by_category(self, category: str) -> ScenarioContainer:
        s = ScenarioContainer({k: v for k, v in self.scenarios.items() if v.category == category})
        if not s.scenarios:
            raise KeyError(f"No scenarios with category '{category}' found")
        return s

    @classmethod
    def from_yaml(cls, yaml_path: Path | None = None) -> ScenarioContainer:
        if yaml_path is None:
            yaml_path = Path(__file__).parent / "scenarios.yaml"
        with open(yaml_path) as f:
            config = yaml.safe_load(f)

        names = [s["name"] for s in config]
        if duplicates := [n for n in names if names.count(n) > 1]:
            raise ValueError(f"Duplicate scenario names detected: {duplicates}")

        return cls({s["name"]: Scenario(**s) for s in config})


Scenarios = ScenarioContainer.from_yaml()
