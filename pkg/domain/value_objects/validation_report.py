from dataclasses import dataclass, field
from typing import List


@dataclass(frozen=True)
class Violation:
    rule: str
    locus: str
    message: str


@dataclass
class ValidationReport:
    violations: List[Violation] = field(default_factory=list)

    @property
    def is_valid(self) -> bool:
        return len(self.violations) == 0

    def add(self, rule: str, locus: str, message: str) -> None:
        self.violations.append(Violation(rule=rule, locus=locus, message=message))

    def by_rule(self, rule: str) -> List[Violation]:
        return [v for v in self.violations if v.rule == rule]

    def __len__(self) -> int:
        return len(self.violations)
