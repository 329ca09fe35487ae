from enum import Enum


class PrimitiveKind(Enum):
    """Semantic primitive types, declared in hierarchical order"""

    OBJECT = "OBJECT"
    RELATION = "RELATION"
    ATTRIBUTE = "ATTRIBUTE"

    @property
    def rank(self) -> int:
        """Position in the object-relation-attribute hierarchy"""
        return {
            PrimitiveKind.OBJECT: 0,
            PrimitiveKind.RELATION: 1,
            PrimitiveKind.ATTRIBUTE: 2,
        }[self]

    @property
    def letter(self) -> str:
        return self.value[0]

    @property
    def arity(self) -> int:
        """Number of template arguments a simplified sentence of this kind takes"""
        return {
            PrimitiveKind.OBJECT: 1,
            PrimitiveKind.RELATION: 3,
            PrimitiveKind.ATTRIBUTE: 2,
        }[self]

    @property
    def tag(self) -> str:
        return f"[{self.value}]"

    @property
    def group_key(self) -> str:
        """Short key used in schedule windows and trace summaries"""
        return {
            PrimitiveKind.OBJECT: "obj",
            PrimitiveKind.RELATION: "rel",
            PrimitiveKind.ATTRIBUTE: "attr",
        }[self]

    @classmethod
    def from_letter(cls, letter: str) -> "PrimitiveKind":
        for kind in cls:
            if kind.letter == letter.upper():
                return kind
        raise ValueError(f"Unknown primitive letter: {letter}")
