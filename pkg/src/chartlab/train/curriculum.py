"""Staged curriculum pools: easy records first, harder stages folded in.

Stage inclusion is cumulative (the epoch-k pool holds every record whose
stage does not exceed the schedule's current stage), so the pool never
shrinks as training progresses.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..numcore import PrngStream


@dataclass(frozen=True)
class CurriculumSchedule:
    epochs_per_stage: tuple = (2, 2, 2)

    def __post_init__(self):
        if len(self.epochs_per_stage) != 3 or any(e < 1 for e in self.epochs_per_stage):
            raise ValueError("epochs_per_stage must be three positive integers")

    def stage_for_epoch(self, epoch: int) -> int:
        e0, e1, _ = self.epochs_per_stage
        if epoch < e0:
            return 0
        if epoch < e0 + e1:
            return 1
        return 2  # epochs beyond the schedule keep the final pool


def curriculum_order(corpus, schedule: CurriculumSchedule | None, epoch: int,
                     rng: PrngStream) -> list:
    """Shuffled sampling pool for one epoch.

    A None schedule disables the curriculum: the full corpus is eligible
    from epoch 0.
    """
    if schedule is None:
        pool = list(corpus)
    else:
        stage = schedule.stage_for_epoch(epoch)
        pool = [r for r in corpus if r.stage <= stage]
    rng.shuffle(pool)
    return pool
