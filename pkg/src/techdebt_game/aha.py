"""Aha-moment vocabulary: the learning objectives the game can surface.

Every card and several built-in mechanics are tagged with aha-moments. A tag
is a ``Group/Variable`` key that must exist in :data:`AHA_REGISTRY`. The
simulator and the session log use these tags to report which insights a game
actually exposed players to.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class AhaGroup(str, Enum):
    CAUSES = "Causes"
    INCURRENCE = "Incurrence"
    CONSEQUENCES = "Consequences"
    VICIOUS_CYCLE = "ViciousCycle"
    REPAYMENT = "Repayment"
    ARCHITECTURE = "Architecture"
    TD_MANAGEMENT = "TdManagement"
    BUSINESS = "Business"


@dataclass(frozen=True)
class AhaMoment:
    """One learning objective: a (group, variable) key plus its explanation."""

    group: AhaGroup
    variable: str
    description: str

    @property
    def key(self) -> str:
        return f"{self.group.value}/{self.variable}"


_ROWS: tuple[tuple[AhaGroup, str, str], ...] = (
    (AhaGroup.CAUSES, "Time", "Time pressure can be a cause of TD (deadlines)."),
    (AhaGroup.CAUSES, "Budget", "Cost pressure can be a cause of TD (license costs)."),
    (AhaGroup.CAUSES, "Business",
     "Business decisions can be a cause of TD (change in requirements, change in strategy)."),
    (AhaGroup.CAUSES, "Management",
     "Management decisions can be a cause of TD (broken communication, poorly planned projects)."),
    (AhaGroup.CAUSES, "Personnel",
     "Personnel can be a cause of TD (lack of personnel, inexperienced or unmotivated personnel, "
     "frequent changes)."),
    (AhaGroup.CAUSES, "Technology", "Chosen technology can be a cause of TD (outdated technology)."),
    (AhaGroup.CAUSES, "Decisions", "Incorrect decisions can be a cause of TD (architectural decisions)."),
    (AhaGroup.CAUSES, "Awareness", "Lack of awareness of TD can be a cause of TD."),
    (AhaGroup.CAUSES, "Chains", "Causes of TD can trigger other causes of TD."),
    (AhaGroup.INCURRENCE, "Conscious", "TD can be incurred consciously."),
    (AhaGroup.INCURRENCE, "Unconscious", "TD can be incurred unconsciously."),
    (AhaGroup.CONSEQUENCES, "Time",
     "TD can lead to more time expenditure (overtime, missed deadlines, longer development process)."),
    (AhaGroup.CONSEQUENCES, "Budget",
     "TD can lead to higher costs (optimization costs, project becomes more expensive)."),
    (AhaGroup.CONSEQUENCES, "Business",
     "TD can negatively affect the business (unmet requirements, loss of customers, legal consequences)."),
    (AhaGroup.CONSEQUENCES, "Management",
     "TD can negatively affect management (lack of controllability, future risk)."),
    (AhaGroup.CONSEQUENCES, "Personnel",
     "TD can lead to personnel problems (terminations, stress, new developers having to be trained)."),
    (AhaGroup.CONSEQUENCES, "Technology",
     "TD can lead to technology problems (maintainability, bugs, dead-end)."),
    (AhaGroup.CONSEQUENCES, "Chains", "Consequences of TD can trigger further consequences of TD."),
    (AhaGroup.VICIOUS_CYCLE, "Inner", "TD can lead to further TD (broken window phenomenon)."),
    (AhaGroup.VICIOUS_CYCLE, "Outer", "Consequences of TD can become causes for new TD."),
    (AhaGroup.REPAYMENT, "Difficult", "Paying back TD is difficult."),
    (AhaGroup.REPAYMENT, "Time-consuming", "Repaying TD is time-consuming."),
    (AhaGroup.REPAYMENT, "Benefits",
     "The repayment of TD can create advantages for further development."),
    (AhaGroup.REPAYMENT, "Simplified",
     "Certain measures make it easier to repay TD (refactoring, engaging specialists, communication)."),
    (AhaGroup.ARCHITECTURE, "Critical", "TD items in architecture are the most critical debts."),
    (AhaGroup.ARCHITECTURE, "Hard-to-repay", "TD items in architecture are the hardest to repay."),
    (AhaGroup.ARCHITECTURE, "Prevents-TD", "Architecture can help deal with TD."),
    (AhaGroup.TD_MANAGEMENT, "Identifying-TD", "To fix TD, they must first be detected."),
    (AhaGroup.TD_MANAGEMENT, "Prioritizing-TD", "To make decisions, TD must be prioritized."),
    (AhaGroup.TD_MANAGEMENT, "Ignoring-TD", "It is not always reasonable to fix (all) TD."),
    (AhaGroup.BUSINESS, "Invisible",
     "TD are invisible in themselves and can only be recognized through symptoms."),
    (AhaGroup.BUSINESS, "Perspective",
     "Causes and consequences of TD can be difficult to discern from a business/management perspective."),
)

AHA_REGISTRY: dict[str, AhaMoment] = {
    f"{group.value}/{variable}": AhaMoment(group, variable, description)
    for group, variable, description in _ROWS
}

# Tags the core mechanics emit on their own, without any card in play. A pack
# with empty decks still covers exactly these rows.
MECHANIC_TAGS: frozenset[str] = frozenset({
    "Incurrence/Conscious",
    "Incurrence/Unconscious",
    "Repayment/Difficult",
    "Repayment/Time-consuming",
    "Repayment/Benefits",
    "Architecture/Critical",
    "Architecture/Hard-to-repay",
    "ViciousCycle/Inner",
})


def is_valid_tag(tag: str) -> bool:
    return tag in AHA_REGISTRY


def validate_tags(tags: object) -> list[str]:
    """Return the unknown tags in ``tags`` (empty when all validate)."""
    if not isinstance(tags, (list, tuple, set, frozenset)):
        return [repr(tags)]
    return [t for t in tags if not isinstance(t, str) or t not in AHA_REGISTRY]
