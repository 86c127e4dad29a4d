"""Domain types shared by the whole package: component taxonomy, phone models,
and the entities that flow through the simulated line."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional


class DomainError(ValueError):
    """A value outside the contract of a domain operation."""


class ComponentClass(Enum):
    """Layer-level component kinds.

    The first five members are the detectable classes the vision system can
    emit.  BATTERY and EXTRACTED_FRAME only exist after battery extraction and
    never appear as perception outputs.
    """

    NORMAL_CASE = "normal_case"
    MIDDLE_LAYER = "middle_layer"
    SCREEN = "screen"
    FILM = "film"
    IPHONE_CASE = "iphone_case"
    BATTERY = "battery"
    EXTRACTED_FRAME = "extracted_frame"

    @property
    def is_detectable(self) -> bool:
        return self in DETECTABLE_CLASSES


DETECTABLE_CLASSES: tuple[ComponentClass, ...] = (
    ComponentClass.NORMAL_CASE,
    ComponentClass.MIDDLE_LAYER,
    ComponentClass.SCREEN,
    ComponentClass.FILM,
    ComponentClass.IPHONE_CASE,
)

#: Index of each detectable class in perception matrices (row/column order).
CLASS_INDEX: dict[ComponentClass, int] = {c: i for i, c in enumerate(DETECTABLE_CLASSES)}


class ValueClass(Enum):
    HIGH_VALUE = "high_value"
    LOW_VALUE = "low_value"


_VALUE_TABLE = {
    ComponentClass.NORMAL_CASE: ValueClass.LOW_VALUE,
    ComponentClass.SCREEN: ValueClass.LOW_VALUE,
    ComponentClass.FILM: ValueClass.LOW_VALUE,
    ComponentClass.MIDDLE_LAYER: ValueClass.HIGH_VALUE,
    ComponentClass.IPHONE_CASE: ValueClass.HIGH_VALUE,
}


def value_class(c: ComponentClass) -> ValueClass:
    """Value tier of a detectable class.

    Plastic/glass layers (normal case, screen, film) feed the low-value
    stream; the two metal, electronics-bearing layers are high value.
    Post-extraction kinds are routed by extraction logic, never here.
    """
    try:
        return _VALUE_TABLE[c]
    except KeyError:
        raise DomainError(f"{c.value} has no value class; only detectable classes do")


class Family(Enum):
    ANDROID_LIKE = "android_like"
    IPHONE_LIKE = "iphone_like"


class Orientation(Enum):
    FACE_DOWN = "face_down"
    FACE_UP = "face_up"


class PhoneState(Enum):
    COLLECTED = "collected"
    CUT = "cut"
    SORTING = "sorting"
    CHILLING = "chilling"
    EXTRACTED = "extracted"
    DONE = "done"


# Per-phone mass implied by the automated line's yearly tonnage at its rated
# throughput (120 phones/h, 8 h/day, 300 day/yr).  The manual baseline implies
# a slightly different mass; both are kept, neither is "corrected".
AUTO_PHONE_MASS_LB: float = 106_546.55 / (120 * 8 * 300)
MANUAL_PHONE_MASS_LB: float = 5_755.0 / (6.16 * 8 * 300)


def derived_phone_mass_lb(yearly_lbs: float, phones_per_hour: float,
                          hours_per_day: float = 8.0, days_per_year: float = 300.0) -> float:
    """Per-unit mass implied by a yearly tonnage and an hourly rate."""
    annual_units = phones_per_hour * hours_per_day * days_per_year
    if annual_units <= 0:
        raise DomainError("annual unit count must be positive to derive a mass")
    return yearly_lbs / annual_units


def default_phone_mass() -> float:
    """Default per-phone mass (lb) used by both the line model and the TEA."""
    return AUTO_PHONE_MASS_LB


_DEFAULT_MANIFESTS = {
    Family.ANDROID_LIKE: (
        ComponentClass.NORMAL_CASE,
        ComponentClass.MIDDLE_LAYER,
        ComponentClass.SCREEN,
        ComponentClass.FILM,
    ),
    Family.IPHONE_LIKE: (
        ComponentClass.IPHONE_CASE,
        ComponentClass.SCREEN,
        ComponentClass.FILM,
    ),
}

_DEFAULT_BATTERY_HOST = {
    Family.ANDROID_LIKE: ComponentClass.MIDDLE_LAYER,
    Family.IPHONE_LIKE: ComponentClass.IPHONE_CASE,
}


def default_manifest(family: Family) -> tuple[ComponentClass, ...]:
    return _DEFAULT_MANIFESTS[family]


def default_mass_fractions(manifest: tuple[ComponentClass, ...],
                           battery_host: Optional[ComponentClass]) -> tuple[float, ...]:
    """Mass split across a manifest when the config gives none.

    The battery host carries 0.5 of the phone mass and the screen 0.3; every
    other layer shares the remainder equally.  The result is renormalised so
    it always sums to exactly 1, which also covers degenerate manifests that
    lack a host or a screen.
    """
    weights = []
    others = []
    host_taken = False
    for i, c in enumerate(manifest):
        if battery_host is not None and c is battery_host and not host_taken:
            weights.append(0.5)
            host_taken = True
        elif c is ComponentClass.SCREEN:
            weights.append(0.3)
        else:
            weights.append(0.0)
            others.append(i)
    leftover = max(0.0, 1.0 - sum(weights))
    if others:
        for i in others:
            weights[i] = leftover / len(others)
    total = sum(weights)
    return tuple(w / total for w in weights)


@dataclass(frozen=True)
class PhoneModel:
    """One phone type in the mix: its family, mass, and cut outcome."""

    id: str
    family: Family
    mass_lb: float = AUTO_PHONE_MASS_LB
    manifest: tuple[ComponentClass, ...] = ()
    battery_host: Optional[ComponentClass] = None
    mass_fractions: tuple[float, ...] = ()

    def __post_init__(self):
        if not self.id:
            raise DomainError("phone model id must be non-empty")
        if self.mass_lb <= 0:
            raise DomainError(f"model {self.id}: mass must be positive")
        manifest = self.manifest or default_manifest(self.family)
        object.__setattr__(self, "manifest", tuple(manifest))
        if not self.manifest:
            raise DomainError(f"model {self.id}: manifest must be non-empty")
        if len(self.manifest) > 62:  # per-item random-stream slots are 6 bits
            raise DomainError(f"model {self.id}: manifest longer than 62 entries")
        for c in self.manifest:
            if not c.is_detectable:
                raise DomainError(f"model {self.id}: {c.value} cannot appear in a manifest")
        host = self.battery_host
        if host is None:
            default_host = _DEFAULT_BATTERY_HOST[self.family]
            host = default_host if default_host in self.manifest else None
            object.__setattr__(self, "battery_host", host)
        if host is not None:
            if host not in self.manifest:
                raise DomainError(f"model {self.id}: battery host {host.value} not in manifest")
            if value_class(host) is not ValueClass.HIGH_VALUE:
                raise DomainError(f"model {self.id}: battery host must be a high-value class")
            if self.manifest.count(host) > 1:
                raise DomainError(f"model {self.id}: at most one battery host allowed")
        fractions = self.mass_fractions or default_mass_fractions(self.manifest, host)
        object.__setattr__(self, "mass_fractions", tuple(float(f) for f in fractions))
        if len(self.mass_fractions) != len(self.manifest):
            raise DomainError(f"model {self.id}: one mass fraction per manifest entry required")
        if any(f < 0 for f in self.mass_fractions):
            raise DomainError(f"model {self.id}: mass fractions must be non-negative")
        if abs(sum(self.mass_fractions) - 1.0) > 1e-9:
            raise DomainError(f"model {self.id}: mass fractions must sum to 1")

    @property
    def has_battery(self) -> bool:
        return self.battery_host is not None


def manifest_for(model: PhoneModel) -> tuple[ComponentClass, ...]:
    """Ordered component classes produced when this model is cut."""
    return model.manifest


@dataclass
class PhoneUnit:
    """A phone instance flowing through the line."""

    uid: int
    model: PhoneModel
    arrival_time: float = 0.0
    state: PhoneState = PhoneState.COLLECTED
    # run bookkeeping, owned by the line simulation
    sort_start: float = -1.0
    sort_end: float = -1.0
    done_time: float = -1.0
    pending_items: int = 0
    correct_components: int = 0


@dataclass
class ComponentItem:
    """A layer produced by cutting, tracked until it lands in a bin."""

    uid: int
    parent_phone: int
    true_class: ComponentClass
    mass_fraction: float
    mass_lb: float
    contains_battery: bool = False
    perceived_class: Optional[ComponentClass] = None
    confidence: float = 0.0
    orientation: Orientation = Orientation.FACE_DOWN
    chilled: bool = False
    rescans: int = 0
