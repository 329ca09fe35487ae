from dataclasses import dataclass, field
from itertools import permutations
from typing import Dict, List, Optional, Tuple

from domain.exceptions.schedule_exceptions import OrderingViolationError
from domain.value_objects.primitive_kind import PrimitiveKind

Window = Tuple[int, int]


@dataclass(frozen=True)
class InjectionOrder:
    """Assignment of primitive kinds to the three schedule slots"""

    kinds: Tuple[PrimitiveKind, PrimitiveKind, PrimitiveKind] = (
        PrimitiveKind.OBJECT,
        PrimitiveKind.RELATION,
        PrimitiveKind.ATTRIBUTE,
    )

    def __post_init__(self):
        if sorted(k.rank for k in self.kinds) != [0, 1, 2]:
            raise ValueError("Injection order must be a permutation of O, R, A")

    @classmethod
    def parse(cls, text: str) -> "InjectionOrder":
        letters = [c for c in text.upper() if c.isalpha()]
        if len(letters) != 3:
            raise ValueError(f"Injection order must name three kinds: {text!r}")
        return cls(tuple(PrimitiveKind.from_letter(c) for c in letters))

    @classmethod
    def all_orders(cls) -> List["InjectionOrder"]:
        return [cls(p) for p in permutations(PrimitiveKind)]

    def slot_of(self, kind: PrimitiveKind) -> int:
        return self.kinds.index(kind)

    def __str__(self) -> str:
        return "-".join(k.letter for k in self.kinds)


DEFAULT_ORDER = InjectionOrder()


@dataclass(frozen=True)
class InjectionSchedule:
    s_obj: int
    s_rel: int
    s_attr: int
    steps: int
    windows: Dict[str, Window] = field(default_factory=dict)
    notes: Tuple[str, ...] = ()

    def __post_init__(self):
        if not (0 == self.s_obj <= self.s_rel < self.s_attr <= self.steps - 1):
            raise OrderingViolationError(self.s_rel, self.s_attr)

    @classmethod
    def fixed(
        cls,
        s_rel: int,
        s_attr: int,
        steps: int,
        windows: Optional[Dict[str, Window]] = None,
    ) -> "InjectionSchedule":
        return cls(
            s_obj=0,
            s_rel=s_rel,
            s_attr=s_attr,
            steps=steps,
            windows=windows or {"obj": (0, 0), "rel": (s_rel, s_rel), "attr": (s_attr, s_attr)},
        )

    @property
    def slots(self) -> Tuple[int, int, int]:
        return (self.s_obj, self.s_rel, self.s_attr)

    def injection_step(
        self,
        kind: PrimitiveKind,
        order: InjectionOrder = DEFAULT_ORDER,
        anchor: str = "step",
    ) -> int:
        """Step at which `kind` becomes active under `order`"""
        slot = order.slot_of(kind)
        step = self.slots[slot]
        if anchor == "window_start":
            window = self.windows.get(_SLOT_KEYS[slot])
            if window is not None:
                step = window[0]
        return step

    def to_dict(self) -> dict:
        return {
            "s_obj": self.s_obj,
            "s_rel": self.s_rel,
            "s_attr": self.s_attr,
            "windows": {k: [lo, hi] for k, (lo, hi) in self.windows.items()},
        }


_SLOT_KEYS = ("obj", "rel", "attr")
