"""Label topologies with exact full-sum and Viterbi scoring.

A path through a StateGraph visits one state per frame, starts in an initial state
and ends in a final state. Only HMM graphs carry transition weights.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum

import numpy as np

from seqshift.acoustic.posteriorgram import BLANK, Posteriorgram
from seqshift.errors import SeqshiftValidationError
from seqshift.lexicon import SILENCE

logger = logging.getLogger(__name__)

NEG_INF = -math.inf
TRANSITION_TOLERANCE = 1e-9


class Topology(str, Enum):
    """Alignment topologies."""

    HMM = "hmm"
    CTC = "ctc"
    TRANSDUCER = "transducer"


class ArcKind(str, Enum):
    LOOP = "loop"
    FORWARD = "forward"
    BLANK_EMIT = "blank-emit"
    LABEL_EMIT = "label-emit"


@dataclass(frozen=True)
class Arc:
    source: int
    target: int
    kind: ArcKind


@dataclass(frozen=True)
class StateGraph:
    """States with their emission label, arcs and initial/final sets."""

    topology: Topology
    labels: tuple[str, ...]
    states: tuple[str, ...]
    arcs: tuple[Arc, ...]
    initial: frozenset[int]
    final: frozenset[int]

    @property
    def num_states(self) -> int:
        return len(self.states)

    def incoming(self, state: int) -> list[Arc]:
        """Arcs into `state`, loops first, then by source index."""
        arcs = [arc for arc in self.arcs if arc.target == state]
        return sorted(arcs, key=lambda arc: (arc.kind is not ArcKind.LOOP, arc.source))


@dataclass(frozen=True)
class TransitionModel:
    """HMM loop/forward log-probabilities and their exponent beta."""

    loop: float
    forward: float
    scale: float = 1.0

    def __post_init__(self) -> None:
        if abs(math.exp(self.loop) + math.exp(self.forward) - 1.0) > TRANSITION_TOLERANCE:
            raise SeqshiftValidationError("loop and forward probabilities must sum to 1")
        if self.scale < 0 or not math.isfinite(self.scale):
            raise SeqshiftValidationError("transition scale must be finite and >= 0")

    @classmethod
    def from_loop_prob(cls, loop_prob: float, scale: float = 1.0) -> "TransitionModel":
        if not 0.0 < loop_prob < 1.0:
            raise SeqshiftValidationError("loop probability must lie in (0, 1)")
        return cls(loop=math.log(loop_prob), forward=math.log1p(-loop_prob), scale=scale)

    def arc_weight(self, graph: StateGraph, arc: Arc) -> float:
        if graph.topology is not Topology.HMM or self.scale == 0:
            return 0.0
        return self.scale * (self.loop if arc.kind is ArcKind.LOOP else self.forward)

    def exit_weight(self, graph: StateGraph) -> float:
        if graph.topology is not Topology.HMM or self.scale == 0:
            return 0.0
        return self.scale * self.forward


UNIFORM_TRANSITIONS = TransitionModel(loop=math.log(0.5), forward=math.log(0.5))


def _hmm_graph(labels: tuple[str, ...]) -> StateGraph:
    arcs = []
    for i in range(len(labels)):
        arcs.append(Arc(i, i, ArcKind.LOOP))
        if i + 1 < len(labels):
            arcs.append(Arc(i, i + 1, ArcKind.FORWARD))
    return StateGraph(
        topology=Topology.HMM,
        labels=labels,
        states=labels,
        arcs=tuple(arcs),
        initial=frozenset({0}),
        final=frozenset({len(labels) - 1}),
    )


def _ctc_graph(labels: tuple[str, ...], blank: str) -> StateGraph:
    # even states are blanks, state 2k+1 emits labels[k]
    states = [blank]
    for label in labels:
        states.extend((label, blank))
    arcs = []
    for s, label in enumerate(states):
        arcs.append(Arc(s, s, ArcKind.LOOP))
        if s + 1 < len(states):
            kind = ArcKind.BLANK_EMIT if states[s + 1] == blank else ArcKind.LABEL_EMIT
            arcs.append(Arc(s, s + 1, kind))
        if s % 2 == 1 and s + 2 < len(states) and states[s + 2] != label:
            arcs.append(Arc(s, s + 2, ArcKind.LABEL_EMIT))
    last = len(states) - 1
    return StateGraph(
        topology=Topology.CTC,
        labels=labels,
        states=tuple(states),
        arcs=tuple(arcs),
        initial=frozenset({0, 1}),
        final=frozenset({last - 1, last}),
    )


def _transducer_graph(labels: tuple[str, ...], blank: str) -> StateGraph:
    # state 2u emits blank after u labels, state 2u+1 emits labels[u]; one label per frame
    states = [blank]
    for label in labels:
        states.extend((label, blank))
    arcs = []
    for u in range(len(labels) + 1):
        b = 2 * u
        arcs.append(Arc(b, b, ArcKind.LOOP))
        if u < len(labels):
            arcs.append(Arc(b, b + 1, ArcKind.LABEL_EMIT))
            arcs.append(Arc(b + 1, b + 2, ArcKind.BLANK_EMIT))
            if u + 1 < len(labels):
                arcs.append(Arc(b + 1, b + 3, ArcKind.LABEL_EMIT))
    last = len(states) - 1
    return StateGraph(
        topology=Topology.TRANSDUCER,
        labels=labels,
        states=tuple(states),
        arcs=tuple(arcs),
        initial=frozenset({0, 1}),
        final=frozenset({last - 1, last}),
    )


def expand_labels(
    topology: Topology | str, labels: Sequence[str], blank: str = BLANK
) -> StateGraph:
    """Build the alignment graph of a label sequence.

    Raises:
        SeqshiftValidationError: empty label sequence
    """
    topology = Topology(topology)
    labels = tuple(labels)
    if not labels:
        raise SeqshiftValidationError("cannot expand an empty label sequence")
    if topology is Topology.HMM:
        return _hmm_graph(labels)
    if blank in labels:
        raise SeqshiftValidationError(f"blank {blank!r} inside the label sequence")
    if topology is Topology.CTC:
        return _ctc_graph(labels, blank)
    return _transducer_graph(labels, blank)


def _emissions(graph: StateGraph, pg: Posteriorgram) -> np.ndarray:
    columns = [pg.index(label) for label in graph.states]
    return pg.log_probs[:, columns]


def forward_score(
    graph: StateGraph, pg: Posteriorgram, trans: TransitionModel = UNIFORM_TRANSITIONS
) -> float:
    """ln of the summed probability of all T-frame paths; -inf when none exists."""
    emit = _emissions(graph, pg)
    sources = np.array([arc.source for arc in graph.arcs], dtype=int)
    targets = np.array([arc.target for arc in graph.arcs], dtype=int)
    weights = np.array([trans.arc_weight(graph, arc) for arc in graph.arcs])

    alpha = np.full(graph.num_states, NEG_INF)
    initial = sorted(graph.initial)
    alpha[initial] = emit[0, initial]
    for t in range(1, pg.num_frames):
        incoming = np.full(graph.num_states, NEG_INF)
        np.logaddexp.at(incoming, targets, alpha[sources] + weights)
        alpha = incoming + emit[t]

    final = sorted(graph.final)
    score = float(np.logaddexp.reduce(alpha[final] + trans.exit_weight(graph)))
    if score == NEG_INF:
        logger.warning(
            f"No valid {graph.topology.value} path for {len(graph.labels)} labels "
            f"in {pg.num_frames} frames"
        )
    return score


@dataclass(frozen=True)
class Alignment:
    """Best path: its score, the state per frame and the label per frame."""

    score: float
    states: tuple[int, ...]
    labels: tuple[str, ...]

    @property
    def valid(self) -> bool:
        return self.score > NEG_INF


def viterbi_align(
    graph: StateGraph, pg: Posteriorgram, trans: TransitionModel = UNIFORM_TRANSITIONS
) -> Alignment:
    """Best path; ties prefer the loop arc, then the lower source state."""
    emit = _emissions(graph, pg)
    frames = pg.num_frames
    incoming = [graph.incoming(s) for s in range(graph.num_states)]
    weights = {arc: trans.arc_weight(graph, arc) for arc in graph.arcs}

    delta = np.full(graph.num_states, NEG_INF)
    initial = sorted(graph.initial)
    delta[initial] = emit[0, initial]
    backpointers = np.full((frames, graph.num_states), -1, dtype=int)
    for t in range(1, frames):
        current = np.full(graph.num_states, NEG_INF)
        for state, arcs in enumerate(incoming):
            best, best_source = NEG_INF, -1
            for arc in arcs:
                candidate = delta[arc.source] + weights[arc]
                if candidate > best:
                    best, best_source = candidate, arc.source
            if best_source >= 0:
                current[state] = best + emit[t, state]
                backpointers[t, state] = best_source
        delta = current

    exit_weight = trans.exit_weight(graph)
    best, last = NEG_INF, -1
    for state in sorted(graph.final):
        if delta[state] + exit_weight > best:
            best, last = delta[state] + exit_weight, state
    if last < 0:
        logger.warning(
            f"No valid {graph.topology.value} alignment for {len(graph.labels)} labels "
            f"in {frames} frames"
        )
        return Alignment(score=NEG_INF, states=(), labels=())

    path = [last]
    for t in range(frames - 1, 0, -1):
        path.append(int(backpointers[t, path[-1]]))
    path.reverse()
    return Alignment(
        score=float(best),
        states=tuple(path),
        labels=tuple(graph.states[s] for s in path),
    )


@dataclass(frozen=True)
class Segment:
    """Frames [start, end) spent in one state."""

    label: str
    start: int
    end: int


def force_align(
    topology: Topology | str,
    labels: Sequence[str],
    pg: Posteriorgram,
    trans: TransitionModel = UNIFORM_TRANSITIONS,
    blank: str = BLANK,
) -> list[Segment]:
    """Viterbi segmentation of an utterance into per-state segments.

    Raises:
        SeqshiftValidationError: no valid alignment exists
    """
    graph = expand_labels(topology, labels, blank)
    alignment = viterbi_align(graph, pg, trans)
    if not alignment.valid:
        raise SeqshiftValidationError(
            f"cannot align {len(graph.labels)} labels to {pg.num_frames} frames"
        )
    segments: list[Segment] = []
    start = 0
    for t in range(1, len(alignment.states) + 1):
        if t == len(alignment.states) or alignment.states[t] != alignment.states[start]:
            segments.append(Segment(graph.states[alignment.states[start]], start, t))
            start = t
    return segments


def alignment_contexts(
    segments: Sequence[Segment],
    order: int,
    boundary: str = SILENCE,
) -> list[tuple[str, ...]]:
    """Per-frame context tuples of a segmentation.

    Order 1 yields (c,), order 2 (l, c) and order 3 (l, c, r), where l and r are the
    neighbouring segment labels and `boundary` stands in at the utterance edges.
    """
    if order not in (1, 2, 3):
        raise ValueError(f"context order must be 1, 2 or 3, got {order}")
    contexts: list[tuple[str, ...]] = []
    for k, segment in enumerate(segments):
        left = segments[k - 1].label if k > 0 else boundary
        right = segments[k + 1].label if k + 1 < len(segments) else boundary
        context = (left, segment.label, right)[:order] if order > 1 else (segment.label,)
        contexts.extend([context] * (segment.end - segment.start))
    return contexts
