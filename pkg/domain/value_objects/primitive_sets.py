from dataclasses import dataclass
from typing import Tuple

from domain.exceptions.graph_exceptions import GraphError, IndexOutOfRangeError

RelationTriple = Tuple[int, str, int]
AttributePair = Tuple[int, str]


@dataclass(frozen=True)
class PrimitiveSets:
    """Objects, relations and attributes extracted from one caption"""

    objects: Tuple[str, ...] = ()
    relations: Tuple[RelationTriple, ...] = ()
    attributes: Tuple[AttributePair, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        object.__setattr__(
            self, "relations", tuple((int(s), str(p), int(o)) for s, p, o in self.relations)
        )
        object.__setattr__(
            self, "attributes", tuple((int(i), str(a)) for i, a in self.attributes)
        )
        self._validate()

    def _validate(self):
        seen = set()
        for position, name in enumerate(self.objects):
            if not name or not name.strip():
                raise GraphError(
                    "Object strings must be nonempty", {"position": position}
                )
            if name in seen:
                raise GraphError(
                    f"Duplicate object {name!r}; merge duplicates before assembly",
                    {"position": position},
                )
            seen.add(name)

        size = len(self.objects)
        for k, (subject, _, obj) in enumerate(self.relations):
            for index in (subject, obj):
                if not 0 <= index < size:
                    raise IndexOutOfRangeError(index, size, f"relations[{k}]")
        for k, (owner, _) in enumerate(self.attributes):
            if not 0 <= owner < size:
                raise IndexOutOfRangeError(owner, size, f"attributes[{k}]")

    @property
    def is_empty(self) -> bool:
        return not self.objects

    def to_dict(self) -> dict:
        return {
            "objects": list(self.objects),
            "relations": [list(r) for r in self.relations],
            "attributes": [list(a) for a in self.attributes],
        }
