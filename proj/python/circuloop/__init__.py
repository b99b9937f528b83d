"""Python bindings for the circuloop warehouse and project logistics core."""

from ._core import (
    DomainError,
    Platform,
    carbon_avoided,
    demo_factors_csv,
    demo_inventory_csv,
    demo_materials_csv,
    improvement_ratio,
    recovery_rate,
    selection_share,
)

__all__ = [
    "DomainError",
    "Platform",
    "carbon_avoided",
    "demo_factors_csv",
    "demo_inventory_csv",
    "demo_materials_csv",
    "improvement_ratio",
    "recovery_rate",
    "selection_share",
]
