# -*- coding: utf-8 -*-
"""The core module."""
from abc import ABC, abstractmethod
from typing import (
    TYPE_CHECKING,
    Any,
    Dict,
    Generic,
    Iterable,
    Iterator,
    Optional,
    Sequence,
    Tuple,
    TypeVar,
)

import graphviz

if TYPE_CHECKING:  # pragma: no cover
    from pygtep.lp import Basis, LpProblem, LpSolution, MilpSolution

LabelType = TypeVar("LabelType")
NodeType = Tuple[str, Dict[str, str]]
EdgeType = Tuple[str, str, str, Dict[str, str]]


class LabelIndex(Generic[LabelType], ABC):
    """Abstract class for a bijection between labels and consecutive integer positions."""

    @abstractmethod
    def get_label(self, index: int) -> LabelType:
        """
        Get the label stored at a position.

        :param index: the position.
        :return: the corresponding label.
        :raise ValueError: if there is not any label for that position.
        """

    @abstractmethod
    def get_index(self, label: LabelType) -> int:
        """
        Get the position of a label.

        :param label: the label.
        :return: its position.
        :raise ValueError: if the label does not belong to the index.
        """

    @property
    @abstractmethod
    def size(self) -> int:
        """
        Get the number of labels.

        :return: the size of the index.
        """

    def contains(self, label: LabelType) -> bool:
        """
        Check if a label is part of the index.

        :param label: the label.
        :return: True if the label is part of the index, False otherwise.
        """
        try:
            index = self.get_index(label)
            if index < 0 or index >= self.size:
                return False
            return label == self.get_label(index)
        except ValueError:
            return False

    def __contains__(self, label: Any) -> bool:
        """Check membership."""
        return self.contains(label)

    @abstractmethod
    def __iter__(self) -> Iterator[LabelType]:
        """Iterate over the labels, in position order."""

    def __len__(self) -> int:
        """Return the size of the index."""
        return self.size

    def __eq__(self, other) -> bool:
        """Check that two indexes hold the same labels in the same order."""
        return isinstance(other, LabelIndex) and list(self) == list(other)


class SolverBackend(ABC):
    """
    Interface of an LP/MILP solver.

    Every backend must report the duals of the rows marked as fixing rows
    of an LpProblem; warm-start bases are hints and may be ignored.
    """

    @property
    @abstractmethod
    def name(self) -> str:
        """Get the registry name of the backend."""

    @abstractmethod
    def solve_lp(
        self, problem: "LpProblem", warm: Optional["Basis"] = None
    ) -> "LpSolution":
        """
        Solve the continuous relaxation of a problem.

        :param problem: the problem; integrality flags are ignored.
        :param warm: an optional basis from a previous solve.
        :return: the LP solution.
        """

    @abstractmethod
    def solve_milp(
        self, problem: "LpProblem", incumbent_hint: Optional[Sequence[float]] = None
    ) -> "MilpSolution":
        """
        Solve a problem with its integrality flags enforced.

        :param problem: the problem.
        :param incumbent_hint: optional values used as a starting incumbent.
        :return: the MILP solution.
        """


class Rendering(ABC):
    """Objects implementing this interface can be drawn as a network."""

    @abstractmethod
    def get_nodes(self) -> Iterable[NodeType]:
        """Get the nodes to draw, as pairs (name, attributes)."""

    @abstractmethod
    def get_edges(self) -> Iterable[EdgeType]:
        """Get the edges to draw, as tuples (source, destination, label, attributes)."""

    def to_graphviz(self) -> graphviz.Digraph:
        """
        Convert to graphviz.Digraph object.

        :return: the graphviz.Digraph object.
        """
        graph = graphviz.Digraph(format="svg")
        for name, attributes in self.get_nodes():
            graph.node(name, **attributes)
        for start, end, label, attributes in self.get_edges():
            graph.edge(start, end, label=label, **attributes)
        return graph
