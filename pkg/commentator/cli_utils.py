"""
Utility functions for the CLI to display run and study information.
"""

import logging
from typing import List, Optional, Sequence

import click

from commentator.scheduler_pipeline import EngineConfig
from commentator.study_eval import ChiSquareResult, HypothesisVerdict
from commentator.tts_client import VoiceConfig

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s %(message)s"


def configure_logging(level: str = "WARNING") -> None:
    logging.basicConfig(level=level.upper(), format=LOG_FORMAT, force=True)


def print_run_info(engine: EngineConfig, voice: Optional[VoiceConfig] = None) -> None:
    """
    Print design, seed and voice in one compact line on stderr.

    Args:
        engine: Engine bundle of the run
        voice: Voice used for synthesis (omitted from the line if None)
    """
    parts = [
        f"Design: {int(engine.design)} ({engine.design.label})",
        f"Seed: {engine.seed}",
        f"Templates: {len(engine.templates)}",
    ]
    if voice is not None:
        parts.append(f"Voice: {voice.voice_name}")
    click.echo(f"[{' | '.join(parts)}]", err=True)


def parse_counts(text: str) -> List[int]:
    try:
        counts = [int(part) for part in text.split(",")]
    except ValueError as e:
        raise click.BadParameter(f"expected comma-separated integers, got {text!r}") from e
    if len(counts) != 5:
        raise click.BadParameter(f"expected 5 counts (one per design), got {len(counts)}")
    return counts


def print_study_result(
    label: str, result: ChiSquareResult, residuals: Sequence[float]
) -> None:
    click.echo(f"{label}: chi2={result.chi2:.3f} df={result.df} p={result.p:.3f}")
    click.echo(
        "  residuals: "
        + " ".join(f"D{i}={r:+.3f}" for i, r in enumerate(residuals, start=1))
    )


def print_hypotheses(verdicts: Sequence[HypothesisVerdict]) -> None:
    for verdict in verdicts:
        mark = "holds" if verdict.holds else "rejected"
        click.echo(f"  {verdict.name} {mark}: {verdict.statement}")
