"""Executable model of the relay protocol: clients, server, sealed envelopes.

Encryption is modeled, not performed: a :class:`SealedEnvelope` is a
capability-checked wrapper that only its named recipient can open. Reports
are wrapped in a server-layer envelope at injection and re-wrapped in a
fresh hop-layer envelope for every relay, so nothing in any envelope's
contents identifies an earlier sender. All client-to-client traffic is
relayed through the server (messaging-app topology); the server therefore
sees per-round traffic metadata and, at the end, which client submitted
each report, but nothing further.

Report tokens carry an opaque uid assigned by a random permutation. The
uid-to-owner map is kept on the transcript as out-of-band bookkeeping for
test oracles only; it is not derivable from the recorded messages.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graphs import Graph
from .walks import WalkTrace

__all__ = [
    "SealedEnvelope",
    "ReportToken",
    "TranscriptEvent",
    "ProtocolState",
    "ProtocolTranscript",
    "AdversaryView",
    "EnvelopeAccessError",
    "run_protocol",
    "adversary_view",
    "validate_transcript",
]

SERVER = "server"

PHASES = ("keying", "exchanging", "submitting", "aggregated")


class EnvelopeAccessError(PermissionError):
    """An identity other than the recipient tried to open an envelope."""


def client_id(index: int) -> str:
    return f"client:{index}"


@dataclass(frozen=True)
class ReportToken:
    """Opaque stand-in for a locally randomized report."""

    uid: int
    is_dummy: bool = False


@dataclass(frozen=True)
class SealedEnvelope:
    """Access-controlled wrapper: only ``recipient`` can read the payload.

    ``layer`` is "hop" (peeled by the next client) or "server" (peeled only
    by the curator). A hop envelope's payload is the still-sealed server
    envelope, so relaying clients never see report contents.
    """

    recipient: str
    layer: str
    payload: object
    uid: int

    def open(self, identity: str):
        if identity != self.recipient:
            raise EnvelopeAccessError(
                f"{identity} cannot open a {self.layer}-layer envelope for {self.recipient}"
            )
        return self.payload


@dataclass(frozen=True)
class TranscriptEvent:
    round: int
    sender: str
    receiver: str
    layer: str
    event: str
    uid: int | None = None

    def as_record(self) -> str:
        uid = "" if self.uid is None else str(self.uid)
        return f"{self.round}\t{self.sender}\t{self.receiver}\t{self.layer}\t{self.event}\t{uid}"


@dataclass(frozen=True)
class ProtocolState:
    """Snapshot of one moment of the run: who holds what, what is in flight.

    During the exchanging phase the held reports plus the in-flight ones
    always account for exactly n reports.
    """

    round: int
    phase: str
    held_counts: tuple
    in_flight: int

    @property
    def total_reports(self) -> int:
        return sum(self.held_counts) + self.in_flight


@dataclass
class ProtocolTranscript:
    """Everything observable about one protocol run, plus test bookkeeping."""

    n: int
    rounds: int
    reporting: str
    events: list = field(default_factory=list)
    phases: list = field(default_factory=list)
    states: list = field(default_factory=list)  # ProtocolState snapshots
    submissions: list = field(default_factory=list)  # (sender index, token uid)
    aggregated: list = field(default_factory=list)  # token uids opened by the server
    held_counts: np.ndarray | None = None  # reports per client after final round
    owner_by_uid: dict = field(default_factory=dict)  # bookkeeping, not message-derivable
    envelopes: list = field(default_factory=list)

    def log(self, round_, sender, receiver, layer, event, uid=None):
        self.events.append(TranscriptEvent(round_, sender, receiver, layer, event, uid))

    def enter_phase(self, phase: str):
        self.phases.append(phase)

    def snapshot(self, round_, phase, held, in_flight):
        self.states.append(
            ProtocolState(
                round=round_, phase=phase,
                held_counts=tuple(len(s) for s in held), in_flight=in_flight,
            )
        )

    def walk_trace(self) -> WalkTrace:
        """Final node of each genuine report, indexed by original owner."""
        final = np.empty(self.n, dtype=np.int64)
        for uid, (owner, node) in self.owner_by_uid.items():
            final[owner] = node
        return WalkTrace(final_nodes=final, rounds=self.rounds)

    def serialize(self) -> str:
        header = "round\tsender\treceiver\tlayer\tevent\tuid"
        return "\n".join([header] + [e.as_record() for e in self.events])


@dataclass
class AdversaryView:
    """What one observer can derive from a completed transcript."""

    observer: str
    links: dict = field(default_factory=dict)  # token uid -> final sender
    visible: list = field(default_factory=list)  # (round, envelope uid) relayed via observer
    violations: list = field(default_factory=list)
    contents_sender_free: bool | None = None


def run_protocol(
    g: Graph, rounds: int, reporting: str = "all", seed: int | None = None
) -> ProtocolTranscript:
    """Execute keying, ``rounds`` exchange rounds, submission, aggregation.

    All clients act synchronously within a round: every held report is
    wrapped hop-layer for a uniformly random neighbor and relayed via the
    server; reports received in a round move again only in the next one.
    """
    if reporting not in ("all", "single"):
        raise ValueError("reporting must be 'all' or 'single'")
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    if g.n < 2 or not g.is_connected:
        raise ValueError("protocol requires a connected graph with at least 2 nodes")

    rng = np.random.default_rng(seed)
    n = g.n
    tr = ProtocolTranscript(n=n, rounds=rounds, reporting=reporting)
    env_uid = iter(range(10**9)).__next__

    def seal(recipient, layer, payload):
        env = SealedEnvelope(recipient=recipient, layer=layer, payload=payload, uid=env_uid())
        tr.envelopes.append(env)
        return env

    # --- keying -----------------------------------------------------------
    tr.enter_phase("keying")
    tr.log(0, SERVER, SERVER, "none", "key-generate")
    for i in range(n):
        tr.log(0, client_id(i), client_id(i), "none", "key-generate")
        tr.log(0, client_id(i), SERVER, "none", "key-publish")
    for i in range(n):
        tr.log(0, SERVER, client_id(i), "none", "key-broadcast")

    # --- inject: randomize locally, seal for the server -------------------
    token_uids = rng.permutation(n)
    held: list[list[SealedEnvelope]] = []
    for i in range(n):
        token = ReportToken(uid=int(token_uids[i]))
        tr.owner_by_uid[token.uid] = (i, i)
        held.append([seal(SERVER, "server", token)])

    # --- exchange rounds ---------------------------------------------------
    tr.enter_phase("exchanging")
    tr.snapshot(0, "exchanging", held, in_flight=0)
    for r in range(1, rounds + 1):
        incoming: list[list[SealedEnvelope]] = [[] for _ in range(n)]
        for i in range(n):
            nbrs = g.neighbors(i)
            for inner in held[i]:
                target = int(nbrs[rng.integers(0, nbrs.size)])
                hop = seal(client_id(target), "hop", inner)
                tr.log(r, client_id(i), SERVER, "hop", "relay-send", hop.uid)
                tr.log(r, SERVER, client_id(target), "hop", "relay-deliver", hop.uid)
                incoming[target].append(hop)
        tr.snapshot(r, "exchanging", [[] for _ in range(n)], in_flight=n)
        for i in range(n):
            opened = []
            for hop in incoming[i]:
                opened.append(hop.open(client_id(i)))
                tr.log(r, client_id(i), client_id(i), "hop", "hop-open", hop.uid)
            held[i] = opened
        for i in range(n):
            for env in held[i]:
                uid = env.payload.uid
                tr.owner_by_uid[uid] = (tr.owner_by_uid[uid][0], i)
        tr.snapshot(r, "exchanging", held, in_flight=0)

    tr.held_counts = np.array([len(s) for s in held], dtype=np.int64)

    # --- submission --------------------------------------------------------
    tr.enter_phase("submitting")
    final_round = rounds + 1
    dummy_uid = n
    for i in range(n):
        if reporting == "all":
            if not held[i]:
                tr.log(final_round, client_id(i), SERVER, "none", "submit-null")
                continue
            for env in held[i]:
                tr.log(final_round, client_id(i), SERVER, "server", "submit", env.uid)
                tr.submissions.append((i, env.payload.uid))
        else:
            if held[i]:
                env = held[i][int(rng.integers(0, len(held[i])))]
            else:
                token = ReportToken(uid=dummy_uid, is_dummy=True)
                dummy_uid += 1
                env = seal(SERVER, "server", token)
            tr.log(final_round, client_id(i), SERVER, "server", "submit", env.uid)
            tr.submissions.append((i, env.payload.uid))

    # --- aggregation --------------------------------------------------------
    tr.enter_phase("aggregated")
    for i in range(n):
        if reporting == "all":
            for env in held[i]:
                token = env.open(SERVER)
                tr.log(final_round, SERVER, SERVER, "server", "server-open", env.uid)
                tr.aggregated.append(token.uid)
    if reporting == "single":
        for sender, uid in tr.submissions:
            tr.log(final_round, SERVER, SERVER, "server", "server-open", uid)
            tr.aggregated.append(uid)
    return tr


def adversary_view(transcript: ProtocolTranscript, observer: str) -> AdversaryView:
    """Derive what ``observer`` ("server" or "client:<j>") learns.

    The server links each submitted report token to its final-round sender,
    and the view certifies that envelope contents alone expose no earlier
    sender. A client sees only the hop envelopes relayed to it, with the
    inner server-layer payloads staying sealed; open attempts against them
    are recorded as violations.
    """
    view = AdversaryView(observer=observer)
    if observer == SERVER:
        view.links = {uid: client_id(sender) for sender, uid in transcript.submissions}
        view.contents_sender_free = _contents_sender_free(transcript)
        return view

    for env in transcript.envelopes:
        if env.layer == "hop" and env.recipient == observer:
            view.visible.append(env.uid)
            inner = env.open(observer)
            try:
                inner.open(observer)
            except EnvelopeAccessError as exc:
                view.violations.append((env.uid, str(exc)))
    return view


def _contents_sender_free(transcript: ProtocolTranscript) -> bool:
    """Check no envelope payload chain carries any sender/owner identity."""
    allowed_env = {"recipient", "layer", "payload", "uid"}
    allowed_token = {"uid", "is_dummy"}
    for env in transcript.envelopes:
        node = env
        while isinstance(node, SealedEnvelope):
            if set(node.__dataclass_fields__) - allowed_env:
                return False
            node = node.payload
        if not isinstance(node, ReportToken):
            return False
        if set(node.__dataclass_fields__) - allowed_token:
            return False
    return True


def validate_transcript(transcript: ProtocolTranscript) -> list[str]:
    """Check every access and conservation invariant; return violations."""
    issues = []

    for ev in transcript.events:
        if ev.event == "server-open" and ev.sender != SERVER:
            issues.append(f"server-layer payload opened by {ev.sender}")
        if ev.event == "hop-open" and ev.sender == SERVER:
            issues.append("server peeled a hop layer")

    if transcript.phases != list(PHASES):
        issues.append(f"phase sequence {transcript.phases} is not monotone keying->aggregated")

    for state in transcript.states:
        if state.phase == "exchanging" and state.total_reports != transcript.n:
            issues.append(
                f"round {state.round}: held+in-flight = {state.total_reports}, "
                f"expected n={transcript.n}"
            )

    n = transcript.n
    for r in range(1, transcript.rounds + 1):
        sends = sum(1 for e in transcript.events if e.round == r and e.event == "relay-send")
        delivers = sum(1 for e in transcript.events if e.round == r and e.event == "relay-deliver")
        opens = sum(1 for e in transcript.events if e.round == r and e.event == "hop-open")
        if not (sends == delivers == opens == n):
            issues.append(f"round {r}: {sends} sends / {delivers} delivers / {opens} opens != n")

    submits = [e for e in transcript.events if e.event == "submit"]
    if transcript.reporting == "single":
        if len(submits) != n:
            issues.append(f"single protocol submitted {len(submits)} messages, expected n={n}")
        genuine = [uid for uid in transcript.aggregated if uid < n]
        if len(set(genuine)) != len(genuine):
            issues.append("a report was submitted twice under the single protocol")
    else:
        if sorted(transcript.aggregated) != list(range(n)):
            issues.append("aggregated multiset does not equal the injected reports")
        if transcript.held_counts is not None and int(transcript.held_counts.sum()) != n:
            issues.append("reports were lost or duplicated during exchange")
    return issues
