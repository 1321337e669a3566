"""Deterministic adversarial network simulator.

Actors (validator shards, clients) exchange information only through
delivered messages; a schedule policy — the adversary — decides which
pending message is delivered next, and may duplicate or drop them.  Runs
are bit-reproducible from (seed, policy), which is what makes the
safety and liveness suites meaningful: a violating schedule can be
replayed exactly.

Two delivery regimes:
- fair: every pending message is eventually delivered (liveness tests);
- unrestricted: arbitrary reordering, duplication, and drops (safety
  tests; progress is never guaranteed, correctness always).

Logical time only.  Real durations would smuggle timing assumptions into
a model whose whole point is asynchrony.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from accept.core import Genesis, Output, OutputId, SystemParams, Transaction, tx_digest
from accept.client import QuorumCollector, Wallet
from accept.schemes import Confirmation, decode_confirmation, output_claim_message, verify_confirmation
from accept.validator import OK, SignRequest, SignResponse, Validator

# ---------------------------------------------------------------- messages


@dataclass(frozen=True)
class SignRequestMsg:
    request: SignRequest


@dataclass(frozen=True)
class SignResponseMsg:
    validator_index: int
    response: SignResponse


@dataclass(frozen=True)
class PaymentMsg:
    output_id: OutputId
    body: Output
    confirmation: Confirmation


@dataclass(frozen=True)
class FlushTick:
    pass


@dataclass(frozen=True)
class Envelope:
    src: str
    dst: str
    payload: object


# ------------------------------------------------------------------- trace


@dataclass
class TraceEvent:
    step: int
    kind: str  # deliver | confirm | accepted | drop | duplicate
    src: str
    dst: str
    msg_type: str
    data: dict = field(default_factory=dict)


class Trace:
    def __init__(self, header: dict):
        self.header = header
        self.events: list[TraceEvent] = []
        self.complete = False

    def add(self, event: TraceEvent) -> None:
        self.events.append(event)

    def confirms(self):
        return [e for e in self.events if e.kind == "confirm"]

    def to_jsonl(self) -> str:
        lines = [json.dumps({"header": self.header, "complete": self.complete})]
        for e in self.events:
            lines.append(
                json.dumps(
                    {
                        "step": e.step,
                        "kind": e.kind,
                        "src": e.src,
                        "dst": e.dst,
                        "msg_type": e.msg_type,
                        "data": e.data,
                    }
                )
            )
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> "Trace":
        lines = [line for line in text.splitlines() if line.strip()]
        head = json.loads(lines[0])
        trace = cls(head["header"])
        trace.complete = head["complete"]
        for line in lines[1:]:
            raw = json.loads(line)
            trace.add(
                TraceEvent(
                    raw["step"], raw["kind"], raw["src"], raw["dst"], raw["msg_type"], raw["data"]
                )
            )
        return trace


# ----------------------------------------------------------------- policies


class SeededPolicy:
    """Adversarial schedule driven by one RNG.

    fairness=True forcibly delivers the oldest pending message every fourth
    step, which bounds how long anything can starve; with it off the policy
    may also duplicate or drop according to the given probabilities.
    """

    def __init__(self, seed: int, fairness: bool = True, p_drop: float = 0.0, p_dup: float = 0.0):
        self.seed = seed
        self.fairness = fairness
        self.p_drop = p_drop if not fairness else 0.0
        self.p_dup = p_dup if not fairness else 0.0
        self.rng = random.Random(seed)

    def describe(self) -> dict:
        return {
            "policy": "fair" if self.fairness else "unrestricted",
            "seed": self.seed,
            "p_drop": self.p_drop,
            "p_dup": self.p_dup,
        }

    def choose(self, pool_size: int, step: int) -> tuple[int, str]:
        if self.fairness and step % 4 == 0:
            index = 0
        else:
            index = self.rng.randrange(pool_size)
        roll = self.rng.random()
        if roll < self.p_drop:
            return index, "drop"
        if roll < self.p_drop + self.p_dup:
            return index, "duplicate"
        return index, "deliver"


class ScriptedPolicy:
    """Plays back an explicit schedule; used to pin down found violations."""

    def __init__(self, choices):
        self.choices = list(choices)
        self._pos = 0

    def describe(self) -> dict:
        return {"policy": "scripted", "length": len(self.choices)}

    def choose(self, pool_size: int, step: int) -> tuple[int, str]:
        if self._pos < len(self.choices):
            index = self.choices[self._pos] % pool_size
            self._pos += 1
            return index, "deliver"
        return 0, "deliver"


# -------------------------------------------------------------------- world


class SimWorld:
    def __init__(self, policy, header: dict | None = None):
        self.policy = policy
        self.actors: dict[str, object] = {}
        self.pool: list[Envelope] = []
        self.step = 0
        self.trace = Trace({**(header or {}), **policy.describe()})

    def register(self, name: str, actor) -> None:
        self.actors[name] = actor
        actor.name = name
        actor.world = self

    def send(self, src: str, dst: str, payload) -> None:
        self.pool.append(Envelope(src, dst, payload))

    def log(self, kind: str, src: str, dst: str, msg_type: str, data: dict) -> None:
        self.trace.add(TraceEvent(self.step, kind, src, dst, msg_type, data))

    def start(self) -> None:
        for actor in list(self.actors.values()):
            actor.on_start()

    def deliver_next(self) -> bool:
        """One scheduling decision; False when the pool is empty."""
        if not self.pool:
            return False
        self.step += 1
        index, action = self.policy.choose(len(self.pool), self.step)
        if action == "drop":
            env = self.pool.pop(index)
            self.log("drop", env.src, env.dst, type(env.payload).__name__, {})
            return True
        if action == "duplicate":
            env = self.pool[index]
            self.pool.append(env)
            self.log("duplicate", env.src, env.dst, type(env.payload).__name__, {})
            return True
        env = self.pool.pop(index)
        self.log("deliver", env.src, env.dst, type(env.payload).__name__, {})
        actor = self.actors.get(env.dst)
        if actor is not None:
            actor.on_message(env.src, env.payload)
        return True

    def run(self, max_steps: int = 100_000) -> Trace:
        self.start()
        while self.step < max_steps:
            if not self.deliver_next():
                self.trace.complete = True
                return self.trace
        self.trace.complete = not self.pool
        return self.trace


# -------------------------------------------------------------------- actors


class Actor:
    name: str = "?"
    world: SimWorld | None = None

    def on_start(self) -> None:
        pass

    def on_message(self, src: str, payload) -> None:
        raise NotImplementedError

    def send(self, dst: str, payload) -> None:
        self.world.send(self.name, dst, payload)

    def snapshot(self) -> tuple:
        """Stable state fingerprint for exhaustive exploration."""
        return ()


class ValidatorActor(Actor):
    """Wraps one honest validator shard.

    Merkle batches flush on a self-addressed tick whose delivery the policy
    controls: batching latency itself is scheduled by the adversary.
    """

    def __init__(self, validator: Validator):
        self.validator = validator
        self._tick_pending = False
        self._outbox: list[tuple[str, SignResponse]] = []

    def on_message(self, src: str, payload) -> None:
        if isinstance(payload, FlushTick):
            self._tick_pending = False
            self.validator.flush_batch()
            self._drain()
            return
        if isinstance(payload, SignRequestMsg):
            self.validator.submit(
                payload.request,
                lambda resp, requester=src: self._outbox.append((requester, resp)),
            )
            self._drain()
            if self.validator.batch_pending() and not self._tick_pending:
                self._tick_pending = True
                self.send(self.name, FlushTick())

    def _drain(self) -> None:
        while self._outbox:
            requester, resp = self._outbox.pop(0)
            self.send(
                requester,
                SignResponseMsg(self.validator.config.validator_index, resp),
            )

    def snapshot(self) -> tuple:
        return (
            "validator",
            self.validator.config.validator_index,
            tuple(sorted(self.validator.spent.items())),
            self.validator.batch_pending(),
        )


class SignEverythingValidatorActor(ValidatorActor):
    """Byzantine: signs anything decodable, ignoring its spent set and all
    confirmation checks.  The strongest helper a double-spender can have."""

    def on_message(self, src: str, payload) -> None:
        if isinstance(payload, FlushTick):
            super().on_message(src, payload)
            return
        if not isinstance(payload, SignRequestMsg):
            return
        tx = payload.request.tx
        digest = tx_digest(tx)
        validator = self.validator
        responses: list[SignResponse] = []
        validator._sign_outputs(tx, digest, responses.append)
        if not responses:
            validator.flush_batch()
        self.send(src, SignResponseMsg(validator.config.validator_index, responses[0]))

    def snapshot(self) -> tuple:
        return ("byz-sign-everything", self.validator.config.validator_index)


class EquivocatingValidatorActor(ValidatorActor):
    """Byzantine: runs the honest pipeline but overrides double-spend
    rejections, signing conflicting transactions."""

    def on_message(self, src: str, payload) -> None:
        if not isinstance(payload, SignRequestMsg):
            super().on_message(src, payload)
            return
        validator = self.validator
        box: list[SignResponse] = []
        validator.submit(payload.request, box.append)
        if not box:
            validator.flush_batch()
        if box[0].status == "double-spend":
            tx = payload.request.tx
            box = []
            validator._sign_outputs(tx, tx_digest(tx), box.append)
            if not box:
                validator.flush_batch()
        self.send(src, SignResponseMsg(validator.config.validator_index, box[0]))


class GarbageValidatorActor(ValidatorActor):
    """Byzantine: replies with structurally valid but unverifiable signatures."""

    def on_message(self, src: str, payload) -> None:
        if not isinstance(payload, SignRequestMsg):
            return
        from accept.schemes import bls as bls_scheme
        from accept.schemes import merkle as merkle_scheme
        from accept.schemes import naive as naive_scheme

        tx = payload.request.tx
        digest = tx_digest(tx)
        index = self.validator.config.validator_index
        scheme = self.validator.config.scheme
        junk = []
        for j in range(len(tx.outputs)):
            seed = bytes([index, j]) * 32
            if scheme == "naive":
                junk.append(naive_scheme.NaiveSignature(index, seed[:64]))
            elif scheme == "merkle":
                junk.append(merkle_scheme.MerkleSignature(index, (), seed[:64]))
            else:
                junk.append(bls_scheme.BlsShareSignature(index, b"\xc0" + seed[:47]))
        self.send(
            src,
            SignResponseMsg(index, SignResponse(OK, digest, signatures=tuple(junk))),
        )

    def snapshot(self) -> tuple:
        return ("byz-garbage", self.validator.config.validator_index)


class SilentValidatorActor(ValidatorActor):
    def on_message(self, src: str, payload) -> None:
        return

    def snapshot(self) -> tuple:
        return ("byz-silent", self.validator.config.validator_index)


@dataclass(frozen=True)
class ByzantineSpec:
    """Which validators are adversarial, and how.  |indices| <= f."""

    indices: tuple[int, ...]
    behavior: str = "sign-everything"  # sign-everything | equivocate | garbage | silent

    def validate(self, params: SystemParams) -> "ByzantineSpec":
        if len(set(self.indices)) != len(self.indices):
            raise ValueError("duplicate byzantine indices")
        if len(self.indices) > params.f:
            raise ValueError(f"at most f={params.f} byzantine validators allowed")
        if any(i >= params.n for i in self.indices):
            raise ValueError("byzantine index out of range")
        if self.behavior not in ("sign-everything", "equivocate", "garbage", "silent"):
            raise ValueError(f"unknown behavior {self.behavior!r}")
        return self


_BYZANTINE_ACTORS = {
    "sign-everything": SignEverythingValidatorActor,
    "equivocate": EquivocatingValidatorActor,
    "garbage": GarbageValidatorActor,
    "silent": SilentValidatorActor,
}


class ClientActor(Actor):
    """An honest client: pays each intent in turn, waiting for funds and
    confirmations, then hands the paid output to the payee."""

    def __init__(self, wallet: Wallet, intents=None, validator_names=None):
        self.wallet = wallet
        self.intents = list(intents or [])
        self.validator_names = validator_names or []
        self._collector: QuorumCollector | None = None
        self._tx: Transaction | None = None
        self.paid: list[bytes] = []

    def on_start(self) -> None:
        self._advance()

    def _advance(self) -> None:
        if self._collector is not None or not self.intents:
            return
        recipient_name, recipient_pub, amount = self.intents[0]
        if self.wallet.balance() < amount:
            return  # wait for funding
        self.intents.pop(0)
        tx = self.wallet.create_transaction([(recipient_pub, amount)])
        self._tx = tx
        self._recipient = recipient_name
        self._collector = self.wallet.collector_for(tx)
        request = self.wallet.request_for(tx)
        for vname in self.validator_names:
            self.send(vname, SignRequestMsg(request))

    def on_message(self, src: str, payload) -> None:
        if isinstance(payload, PaymentMsg):
            if self.wallet.accept_payment(payload.output_id, payload.body, payload.confirmation):
                self.world.log(
                    "accepted",
                    src,
                    self.name,
                    "PaymentMsg",
                    {"key": payload.output_id.key().hex()},
                )
            self._advance()
            return
        if not isinstance(payload, SignResponseMsg) or self._collector is None:
            return
        if self._collector.add_response(payload.validator_index, payload.response):
            tx, collector = self._tx, self._collector
            confirmations = collector.confirmations
            self.wallet.apply_spend(tx, confirmations)
            digest = tx_digest(tx)
            log_confirm(self.world, self.name, tx, confirmations)
            self.paid.append(digest)
            self.send(
                self._recipient,
                PaymentMsg(OutputId(digest, 0), tx.outputs[0], confirmations[0]),
            )
            self._collector = None
            self._tx = None
            self._advance()

    def snapshot(self) -> tuple:
        pending = None
        if self._collector is not None:
            pending = tuple(
                tuple(sorted(bucket)) for bucket in self._collector._sigs
            )
        return ("client", self.wallet.balance(), tuple(self.paid), pending, len(self.intents))


class DoubleSpendClientActor(Actor):
    """Adversarial client: issues `fanout` conflicting transactions spending
    the same genesis output, and assembles every confirmation it can."""

    def __init__(self, wallet: Wallet, genesis: Genesis, genesis_index: int,
                 recipients, validator_names):
        self.wallet = wallet
        self.genesis = genesis
        self.genesis_index = genesis_index
        self.recipients = recipients
        self.validator_names = validator_names
        self.collectors: dict[bytes, QuorumCollector] = {}
        self.txs: dict[bytes, Transaction] = {}
        self.confirmed: list[bytes] = []

    def on_start(self) -> None:
        from accept.core import TxInput, sign_transaction

        entry = self.genesis.entries[self.genesis_index]
        oid = self.genesis.output_id(self.genesis_index)
        for recipient_pub in self.recipients:
            tx = sign_transaction(
                self.wallet.secret,
                (TxInput(oid, entry),),
                (Output(entry.amount, recipient_pub),),
            )
            digest = tx_digest(tx)
            self.txs[digest] = tx
            self.collectors[digest] = self.wallet.collector_for(tx)
            request = SignRequest(tx, (None,))
            for vname in self.validator_names:
                self.send(vname, SignRequestMsg(request))

    def on_message(self, src: str, payload) -> None:
        if not isinstance(payload, SignResponseMsg):
            return
        collector = self.collectors.get(payload.response.tx_digest)
        if collector is None or collector.is_complete():
            return
        if collector.add_response(payload.validator_index, payload.response):
            digest = payload.response.tx_digest
            self.confirmed.append(digest)
            log_confirm(self.world, self.name, self.txs[digest], collector.confirmations)

    def snapshot(self) -> tuple:
        progress = tuple(
            (digest.hex()[:8], tuple(tuple(sorted(b)) for b in c._sigs), c.is_complete())
            for digest, c in sorted(self.collectors.items())
        )
        return ("double-spender", progress, tuple(d.hex()[:8] for d in self.confirmed))


def log_confirm(world: SimWorld, client: str, tx: Transaction, confirmations) -> None:
    digest = tx_digest(tx)
    world.log(
        "confirm",
        client,
        client,
        "Confirmation",
        {
            "digest": digest.hex(),
            "inputs": [
                {
                    "source_digest": inp.id.source_digest.hex(),
                    "index": inp.id.index,
                    "amount": inp.body.amount,
                    "owner": inp.body.owner.hex(),
                }
                for inp in tx.inputs
            ],
            "outputs": [
                {"index": j, "amount": out.amount, "owner": out.owner.hex()}
                for j, out in enumerate(tx.outputs)
            ],
            "confirmations": {
                str(j): conf.encode().hex() for j, conf in confirmations.items()
            },
        },
    )


# ------------------------------------------------------------------ auditors


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str


def _reconstruct_tx(event: TraceEvent) -> Transaction | None:
    """Rebuild the signature-less transaction a confirm event claims.

    The digest is recomputed from the rebuilt body: a client cannot lie
    about what a confirmed transaction spends without breaking the hash."""
    from accept.core import TxInput

    try:
        inputs = tuple(
            TxInput(
                OutputId(bytes.fromhex(i["source_digest"]), i["index"]),
                Output(i["amount"], bytes.fromhex(i["owner"])),
            )
            for i in event.data["inputs"]
        )
        outputs = tuple(
            Output(out["amount"], bytes.fromhex(out["owner"]))
            for out in sorted(event.data["outputs"], key=lambda o: o["index"])
        )
        tx = Transaction(inputs, outputs, b"\x00" * 64)
    except (KeyError, ValueError):
        return None
    if tx_digest(tx).hex() != event.data["digest"]:
        return None
    return tx


def _verified_confirms(trace: Trace):
    """(event, tx) pairs whose digest is consistent and whose confirmations
    verify under the header's validator keys.  A lying client can log
    anything; only cryptographic proofs count."""
    params = SystemParams(**trace.header["params"])
    pubkeys = [bytes.fromhex(h) for h in trace.header["ed_pubkeys"]]
    master = bytes.fromhex(trace.header["bls_master"]) if trace.header.get("bls_master") else None
    for event in trace.confirms():
        tx = _reconstruct_tx(event)
        if tx is None:
            continue
        digest = bytes.fromhex(event.data["digest"])
        ok = True
        for j, out in enumerate(tx.outputs):
            blob = event.data["confirmations"].get(str(j))
            if blob is None:
                ok = False
                break
            conf = decode_confirmation(bytes.fromhex(blob))
            claim = output_claim_message(digest, j, out)
            if not verify_confirmation(params, pubkeys, master, claim, conf):
                ok = False
                break
        if ok:
            yield event, tx


def audit_no_double_spend(trace: Trace) -> list[Violation]:
    """Two verified confirmations spending one output id = a violation."""
    spent: dict[bytes, str] = {}
    violations = []
    for event, tx in _verified_confirms(trace):
        digest = event.data["digest"]
        for inp in tx.inputs:
            key = inp.id.key()
            existing = spent.get(key)
            if existing is None:
                spent[key] = digest
            elif existing != digest:
                violations.append(
                    Violation(
                        "double-spend",
                        f"output {key.hex()} spent by {existing} and {digest}",
                    )
                )
    return violations


def audit_conservation(trace: Trace, genesis: Genesis) -> list[Violation]:
    """Confirmed-unspent value must equal the genesis total at every prefix."""
    unspent: dict[bytes, int] = {
        genesis.output_id(i).key(): entry.amount
        for i, entry in enumerate(genesis.entries)
    }
    total = genesis.total()
    violations = []
    seen: set[str] = set()
    for event, tx in _verified_confirms(trace):
        digest = event.data["digest"]
        if digest in seen:
            continue
        seen.add(digest)
        keys = [inp.id.key() for inp in tx.inputs]
        if any(key not in unspent for key in keys):
            violations.append(
                Violation("unknown-input", f"tx {digest} spends an unconfirmed output")
            )
            continue
        for key in keys:
            del unspent[key]
        for j, out in enumerate(tx.outputs):
            unspent[OutputId(bytes.fromhex(digest), j).key()] = out.amount
        if sum(unspent.values()) != total:
            violations.append(
                Violation(
                    "conservation",
                    f"after {digest}: {sum(unspent.values())} != genesis {total}",
                )
            )
    return violations


# ------------------------------------------------------- world construction


def trace_header(ring, genesis: Genesis, scheme: str) -> dict:
    return {
        "params": {"n": ring.params.n, "f": ring.params.f, "quorum": ring.params.quorum},
        "scheme": scheme,
        "ed_pubkeys": [pk.hex() for pk in ring.ed_pubkeys],
        "bls_master": ring.bls.master_public.hex(),
        "genesis_digest": genesis.digest.hex(),
        "genesis_total": genesis.total(),
    }


def validator_names(n: int) -> list[str]:
    return [f"v{i}" for i in range(n)]


def build_validator_actors(
    ring,
    genesis: Genesis,
    scheme: str,
    byzantine: ByzantineSpec | None = None,
    spent_buckets: int = 1 << 10,
    merkle_batch_size: int = 4,
):
    from accept.validator import ValidatorConfig

    if byzantine is not None:
        byzantine.validate(ring.params)
    actors = {}
    for i in range(ring.params.n):
        config = ValidatorConfig(
            validator_index=i,
            scheme=scheme,
            spent_buckets=spent_buckets,
            merkle_batch_size=merkle_batch_size,
        )
        validator = Validator(
            ring.params,
            config,
            ring.ed_secrets[i],
            ring.ed_pubkeys,
            genesis,
            bls_share=ring.bls.shares[i],
            bls_master_public=ring.bls.master_public,
        )
        if byzantine is not None and i in byzantine.indices:
            actor_cls = _BYZANTINE_ACTORS[byzantine.behavior]
            actors[f"v{i}"] = actor_cls(validator)
        else:
            actors[f"v{i}"] = ValidatorActor(validator)
    return actors


# --------------------------------------------------- exhaustive exploration


@dataclass
class ExploreResult:
    states: int
    terminals: int
    violations: list[Violation]
    violating_schedule: list[int] | None = None


def explore_schedules(
    world_factory,
    max_depth: int = 64,
    max_states: int = 500_000,
    collapse=None,
) -> ExploreResult:
    """Exhaustively enumerate delivery schedules, deduplicating world states.

    Worlds are rebuilt and replayed per explored edge (actors need no
    snapshot/restore machinery), with memoization on actor-state
    fingerprints.  `collapse(envelope) -> bool` marks message classes whose
    delivery order is immaterial (they commute on the receiving actor);
    such messages are delivered eagerly to cut the branching factor.

    The violation predicate is double-spend detection over every client's
    assembled confirmations, checked at every reached state, so dropped
    messages need no separate enumeration: every prefix is itself reached.
    """
    seen: set = set()
    result = ExploreResult(states=0, terminals=0, violations=[])

    def replay(choices: list[int]) -> SimWorld:
        world = world_factory()
        world.start()
        _collapse_eagerly(world, collapse)
        for choice in choices:
            env = world.pool.pop(choice)
            world.step += 1
            actor = world.actors.get(env.dst)
            if actor is not None:
                actor.on_message(env.src, env.payload)
            _collapse_eagerly(world, collapse)
        return world

    def fingerprint(world: SimWorld) -> tuple:
        actors = tuple(world.actors[name].snapshot() for name in sorted(world.actors))
        pool = tuple(
            sorted((e.src, e.dst, repr(e.payload)) for e in world.pool)
        )
        return actors, pool

    def spent_conflicts(world: SimWorld) -> list[Violation]:
        assembled: dict[str, str] = {}
        found = []
        for actor in world.actors.values():
            if not isinstance(actor, DoubleSpendClientActor):
                continue
            for digest, collector in actor.collectors.items():
                if not collector.is_complete():
                    continue
                for inp in actor.txs[digest].inputs:
                    key = inp.id.key().hex()
                    existing = assembled.get(key)
                    if existing is None:
                        assembled[key] = digest.hex()
                    elif existing != digest.hex():
                        found.append(
                            Violation(
                                "double-spend",
                                f"{key} confirmed by {existing} and {digest.hex()}",
                            )
                        )
        return found

    stack: list[list[int]] = [[]]
    while stack:
        choices = stack.pop()
        world = replay(choices)
        key = fingerprint(world)
        if key in seen:
            continue
        seen.add(key)
        result.states += 1
        if result.states > max_states:
            raise RuntimeError(f"state budget exceeded ({max_states})")
        conflicts = spent_conflicts(world)
        if conflicts:
            result.violations.extend(conflicts)
            if result.violating_schedule is None:
                result.violating_schedule = choices
            continue
        if not world.pool:
            result.terminals += 1
            continue
        if len(choices) >= max_depth:
            continue
        for index in range(len(world.pool)):
            stack.append(choices + [index])
    return result


def _collapse_eagerly(world: SimWorld, collapse) -> None:
    if collapse is None:
        return
    progressed = True
    while progressed:
        progressed = False
        for i, env in enumerate(world.pool):
            if collapse(env):
                world.pool.pop(i)
                world.step += 1
                actor = world.actors.get(env.dst)
                if actor is not None:
                    actor.on_message(env.src, env.payload)
                progressed = True
                break


def collapse_responses(env: Envelope) -> bool:
    """Reduction for exhaustive double-spend workloads: responses only
    accumulate into monotone per-collector signature sets and the
    double-spending client sends nothing when a collection completes, so
    response delivery order can affect neither validator state nor which
    confirmations become assemblable.  Not sound for clients that react to
    completion by sending messages; the full (collapse=None) exploration
    covers those."""
    return isinstance(env.payload, SignResponseMsg)
