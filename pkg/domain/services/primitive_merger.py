from typing import Dict, Iterable, List, Sequence, Tuple

from domain.value_objects.primitive_sets import PrimitiveSets

RawObject = Tuple[str, Sequence[str]]


def _key(name: str) -> str:
    return name.strip().casefold()


class PrimitiveMerger:

    def merge(
        self,
        objects: Iterable[RawObject],
        relations: Iterable[Tuple[int, str, int]] = (),
        attributes: Iterable[Tuple[int, str]] = (),
    ) -> PrimitiveSets:
        """Merge duplicate objects and rewrite every index to the merged list.

        Duplicates match case-insensitively on the trimmed name; the first
        occurrence keeps its position and spelling and the attribute lists are
        unioned. Triples and attribute pairs that collapse onto an existing one
        after remapping are dropped.
        """
        merged: List[str] = []
        position: Dict[str, int] = {}
        remap: List[int] = []
        raw_attributes: List[Tuple[int, str]] = []

        for raw_index, (name, attrs) in enumerate(objects):
            key = _key(name)
            if key not in position:
                position[key] = len(merged)
                merged.append(name.strip())
            remap.append(position[key])
            raw_attributes.extend((raw_index, attr) for attr in attrs)
        raw_attributes.extend(attributes)

        out_relations = []
        seen_relations = set()
        for subject, predicate, obj in relations:
            triple = (remap[subject], predicate.strip(), remap[obj])
            if triple not in seen_relations:
                seen_relations.add(triple)
                out_relations.append(triple)

        out_attributes = []
        seen_attributes = set()
        for owner, attr in raw_attributes:
            attr = attr.strip()
            if not attr:
                continue
            pair = (remap[owner], attr)
            if pair not in seen_attributes:
                seen_attributes.add(pair)
                out_attributes.append(pair)
        # owner order keeps attributes grouped the way nodes list them
        out_attributes.sort(key=lambda pair: pair[0])

        return PrimitiveSets(
            objects=tuple(merged),
            relations=tuple(out_relations),
            attributes=tuple(out_attributes),
        )
