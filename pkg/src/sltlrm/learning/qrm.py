"""Q-learning for reward machines (QRM) and the lifelong memory update.

Every environment experience ``(s, a, s')`` updates the Q-table of every
non-terminal machine state counterfactually.  The event label is the one
emitted on arrival, ``L(s')``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..reward_machine import PotentialTable, compute_potential
from ..sltl import TRUE, Formula, canonical_string
from .memory import Memory, acquire_with_source
from .qtable import CompositionMapping, QTable

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LearnParams:
    epsilon: float = 0.1
    gamma: float = 0.9
    alpha: float = 1.0
    use_shaping: bool = False
    episode_cap: int = 1000
    rng_seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("gamma must lie in (0, 1]")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must lie in (0, 1]")
        if self.episode_cap < 1:
            raise ValueError("episode_cap must be positive")


def _greedy_random_ties(row: np.ndarray, rng: np.random.Generator) -> int:
    best = np.flatnonzero(row == row.max())
    if len(best) == 1:
        return int(best[0])
    return int(best[rng.integers(len(best))])


def select_action(q: QTable, s: int, epsilon: float, rng: np.random.Generator) -> int:
    """Epsilon-greedy choice; greedy ties are broken uniformly at random."""
    row = q.values[s]
    if rng.random() < epsilon:
        return int(rng.integers(len(row)))
    return _greedy_random_ties(row, rng)


def _blend(old, target, alpha):
    # exact target when alpha == 1
    return (1.0 - alpha) * old + alpha * target


def qrm_step(memory: Memory, active: Formula, s: int, a: int, s_next: int,
             label_next: frozenset, params: LearnParams,
             potential: Optional[PotentialTable] = None) -> None:
    """Reference (unvectorized) counterfactual update of every Q-table."""
    rm = memory.rm
    if active not in rm:
        raise KeyError(f"active state {canonical_string(active)!r} is not in the machine")
    targets = {}
    for u in rm.non_terminal_states():
        u_next = rm.delta(u, label_next)
        if potential is not None and params.use_shaping:
            r = rm.reward(u, label_next) + potential.gamma * potential[u_next] - potential[u]
        else:
            r = rm.reward(u, label_next)
        if rm.is_terminal(u_next):
            targets[u] = r
        else:
            targets[u] = r + params.gamma * memory.qtables[u_next].values[s_next].max()
    for u, target in targets.items():
        q = memory.qtables[u]
        q.values[s, a] = _blend(q.values[s, a], target, params.alpha)


# -- vectorized training --------------------------------------------------------


class QRMBatch:
    """All non-terminal Q-tables of a memory stacked into one array.

    Row ``K`` stands for ``true`` and row ``K + 1`` for ``false``; both stay
    zero, so a terminal successor contributes nothing beyond its reward.
    """

    def __init__(self, memory: Memory, env, params: LearnParams,
                 potential: Optional[PotentialTable] = None):
        rm = memory.rm
        self.memory = memory
        self.params = params
        self.states = rm.non_terminal_states()
        self.index = {u: i for i, u in enumerate(self.states)}
        k = len(self.states)
        self.k = k
        self.success = k
        self.failure = k + 1
        self.q = np.zeros((k + 2, memory.n_states, memory.n_actions))
        for u, i in self.index.items():
            self.q[i] = memory.qtables[u].values
        labels = list(rm.alphabet)
        label_index = {l: i for i, l in enumerate(labels)}
        try:
            self.cell_label = np.array([label_index[l] for l in env.labels], dtype=np.int64)
        except KeyError as exc:
            raise ValueError(f"environment emits a label outside the machine alphabet: {exc}") from None
        shaping = potential is not None and params.use_shaping
        self.next_u = np.empty((len(labels), k), dtype=np.int64)
        self.reward = np.empty((len(labels), k))
        for li, l in enumerate(labels):
            for u, i in self.index.items():
                v = rm.delta(u, l)
                r = rm.reward(u, l)
                if shaping:
                    r += potential.gamma * potential[v] - potential[u]
                if v is TRUE:
                    self.next_u[li, i] = self.success
                elif rm.is_terminal(v):
                    self.next_u[li, i] = self.failure
                else:
                    self.next_u[li, i] = self.index[v]
                self.reward[li, i] = r

    def update(self, s: int, a: int, s_next: int) -> int:
        """Apply one experience; return the label index of ``s_next``."""
        li = self.cell_label[s_next]
        p = self.params
        target = self.reward[li] + p.gamma * self.q[self.next_u[li], s_next].max(axis=1)
        k = self.k
        self.q[:k, s, a] = _blend(self.q[:k, s, a], target, p.alpha)
        return li

    def write_back(self) -> None:
        for u, i in self.index.items():
            self.memory.qtables[u].values[...] = self.q[i]

    def greedy_rollout(self, env, task: Formula, cap: int, start: Optional[int] = None) -> tuple[int, bool]:
        """Steps of a greedy (argmax, lowest index on ties) episode."""
        u = self.index[task]
        s = env.reset() if start is None else start
        for t in range(1, cap + 1):
            a = int(np.argmax(self.q[u, s]))
            s = int(env.next_state[s, a])
            u = int(self.next_u[self.cell_label[s], u])
            if u >= self.k:
                return t, u == self.success
        return cap, False


@dataclass
class EpisodeRecord:
    task: str
    episode: int
    env_steps: int
    episode_steps: int
    success: bool


@dataclass
class EvalRecord:
    task: str
    env_steps: int
    eval_steps: int
    success: bool


@dataclass
class PhaseMetrics:
    targets: list
    episodes: list = field(default_factory=list)
    evals: list = field(default_factory=list)
    new_states: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)
    env_steps: int = 0

    def steps_to_complete(self, cap: int) -> list[int]:
        """Per-episode completion cost: episode length on success, ``cap`` otherwise."""
        return [e.episode_steps if e.success else cap for e in self.episodes]


def prepare_targets(memory: Memory, targets: Sequence[Formula], mapping: CompositionMapping,
                    rng: np.random.Generator) -> tuple[list, dict]:
    """Extend the machine with each target and initialize every new state's
    Q-table from memory.  Returns (all new states, provenance)."""
    new_states, provenance = [], {}
    for phi in targets:
        new = memory.rm.extend(phi)
        for psi in new:
            if memory.rm.is_terminal(psi):
                continue
            q, src = acquire_with_source(memory, psi, mapping, rng)
            memory.qtables[psi] = q
            memory.provenance[psi] = src
            provenance[psi] = src
        new_states.extend(new)
    return new_states, provenance


def run_qrm(memory: Memory, targets: Sequence[Formula], env, params: LearnParams,
            budget: int, rng: np.random.Generator, *, eval_every: int = 0,
            step_offset: int = 0, metrics: Optional[PhaseMetrics] = None) -> PhaseMetrics:
    """Train for ``budget`` environment steps, cycling episodes through
    ``targets`` in order.  An episode cut short by the budget is dropped."""
    metrics = metrics if metrics is not None else PhaseMetrics([str(t) for t in targets])
    if not targets or budget <= 0:
        return metrics
    potential = compute_potential(memory.rm, params.gamma) if params.use_shaping else None
    batch = QRMBatch(memory, env, params, potential)
    q, next_u, cell_label = batch.q, batch.next_u, batch.cell_label
    env_next = env.next_state
    eps, cap, n_actions = params.epsilon, params.episode_cap, memory.n_actions
    k = batch.k
    task_idx = [batch.index[t] for t in targets]
    names = [str(t) for t in targets]
    slip = getattr(env, "slip", 0.0)

    def evaluate_all(at):
        for t, name in zip(targets, names):
            steps, ok = batch.greedy_rollout(env, t, cap)
            metrics.evals.append(EvalRecord(name, at, steps, ok))

    steps = 0
    episode = 0
    next_eval = eval_every if eval_every > 0 else None
    while steps < budget:
        ti = episode % len(targets)
        u = task_idx[ti]
        s = env.reset(rng)
        ep_steps = 0
        outcome = None
        while steps < budget:
            if rng.random() < eps:
                a = int(rng.integers(n_actions))
            else:
                a = _greedy_random_ties(q[u, s], rng)
            if slip:
                s2 = env.step(s, a, rng)
            else:
                s2 = int(env_next[s, a])
            li = batch.update(s, a, s2)
            u = int(next_u[li, u])
            s = s2
            steps += 1
            ep_steps += 1
            if next_eval is not None and steps >= next_eval:
                evaluate_all(step_offset + steps)
                next_eval += eval_every
            if u >= k:
                outcome = u == batch.success
                break
            if ep_steps >= cap:
                outcome = False
                break
        if outcome is None:
            break
        metrics.episodes.append(
            EpisodeRecord(names[ti], episode, step_offset + steps, ep_steps, outcome)
        )
        episode += 1
    batch.write_back()
    metrics.env_steps += steps
    return metrics


def lifelong_update(memory: Memory, targets: Sequence[Formula], env, params: LearnParams,
                    mapping: CompositionMapping, phase_budget: int,
                    rng: Optional[np.random.Generator] = None, *, eval_every: int = 0,
                    step_offset: int = 0) -> PhaseMetrics:
    """One learning phase of the lifelong memory.

    Extends the machine with each target, transfers knowledge into every
    new state, trains all targets with QRM for ``phase_budget`` steps and
    finally marks the new states as learned.
    """
    if rng is None:
        rng = np.random.default_rng(params.rng_seed)
    targets = list(targets)
    new_states, provenance = prepare_targets(memory, targets, mapping, rng)
    metrics = PhaseMetrics([str(t) for t in targets], new_states=new_states, provenance=provenance)
    if targets:
        run_qrm(memory, targets, env, params, phase_budget, rng,
                eval_every=eval_every, step_offset=step_offset, metrics=metrics)
    memory.learned.update(new_states)
    return metrics
