"""Headless batch execution of all-virtual sessions.

Runs a scenario N times with consecutive seeds, collects who performed
what and when, and renders a plain-text report.  Useful for checking
that a scenario is playable by its configured cast and for regression
runs over agent behaviour.
"""

from __future__ import annotations

import io
import os
from collections import defaultdict
from dataclasses import dataclass, field

from . import events as ev
from . import scoring
from .configs import AgentSpec
from .dsl.parser import parse
from .session import Session, SessionConfig


@dataclass
class RunOutcome:
    seed: int
    finished: bool
    final_tick: int
    # action id -> sorted performers tuple
    performers: dict[str, tuple[str, ...]] = field(default_factory=dict)
    completion_tick: dict[str, int] = field(default_factory=dict)
    log_text: str = ""
    final_state_hash: str = ""


@dataclass
class BatchReport:
    scenario: str
    runs: list[RunOutcome]

    @property
    def completed_runs(self) -> int:
        return sum(1 for run in self.runs if run.finished)

    def performer_histogram(self) -> dict[str, dict[str, int]]:
        """action id -> performer -> number of runs they completed it."""
        histogram: dict[str, dict[str, int]] = defaultdict(lambda: defaultdict(int))
        for run in self.runs:
            for action, who in run.performers.items():
                histogram[action][",".join(who)] += 1
        return {a: dict(sorted(inner.items())) for a, inner in sorted(histogram.items())}

    def mean_completion_tick(self) -> dict[str, float]:
        ticks: dict[str, list[int]] = defaultdict(list)
        for run in self.runs:
            for action, tick in run.completion_tick.items():
                ticks[action].append(tick)
        return {a: sum(ts) / len(ts) for a, ts in sorted(ticks.items())}

    def render(self) -> str:
        out = io.StringIO()
        out.write(f"scenario: {self.scenario}\n")
        out.write(f"runs: {len(self.runs)}  completed: {self.completed_runs}\n")
        incomplete = [run.seed for run in self.runs if not run.finished]
        if incomplete:
            out.write(f"incomplete seeds: {incomplete}\n")
        means = self.mean_completion_tick()
        out.write("\naction                         mean tick  performers (runs)\n")
        for action, inner in self.performer_histogram().items():
            mean = means.get(action, 0.0)
            who = "  ".join(f"{name} ({count})" for name, count in inner.items())
            out.write(f"{action:30s} {mean:9.2f}  {who}\n")
        return out.getvalue()


def run_one(
    doc_text: str,
    agents: list[AgentSpec],
    criteria: tuple[scoring.Criterion, ...],
    seed: int,
    max_ticks: int | None = None,
    keep_log: bool = True,
) -> RunOutcome:
    doc = parse(doc_text)
    session = Session(
        doc,
        agents,
        criteria,
        config=SessionConfig(seed=seed, max_ticks=max_ticks),
        scenario_text=doc_text,
    )
    buf = io.StringIO()
    session.attach_log(buf)
    finished = session.run_to_completion(max_ticks)
    session.close_log()
    outcome = RunOutcome(
        seed=seed,
        finished=finished,
        final_tick=session.tick,
        final_state_hash=session.state_hash(),
    )
    for completed in session.state.completed:
        outcome.performers[completed.action] = tuple(sorted(completed.performers))
        outcome.completion_tick[completed.action] = completed.tick
    if keep_log:
        outcome.log_text = buf.getvalue()
    return outcome


def run_batch(
    doc_text: str,
    agents: list[AgentSpec],
    criteria: tuple[scoring.Criterion, ...] = scoring.DEFAULT_CRITERIA,
    seed: int = 0,
    runs: int = 1,
    logs_dir: str | None = None,
    max_ticks: int | None = None,
) -> BatchReport:
    """Run the scenario ``runs`` times with seeds seed, seed+1, ..."""
    doc = parse(doc_text)
    outcomes = []
    for i in range(runs):
        outcome = run_one(
            doc_text,
            agents,
            criteria,
            seed + i,
            max_ticks=max_ticks,
            keep_log=logs_dir is not None,
        )
        if logs_dir is not None:
            os.makedirs(logs_dir, exist_ok=True)
            path = os.path.join(logs_dir, f"run_{seed + i}.events")
            with open(path, "w", encoding="utf-8") as handle:
                handle.write(outcome.log_text)
        outcomes.append(outcome)
    return BatchReport(scenario=doc.name, runs=outcomes)
