import numpy as np
import pytest

from auditgame import AuditConfidence, AuditorParams, HypothesisPair
from pathlib import Path

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture
def config_dir() -> Path:
    return CONFIG_DIR


def dp_params(lam=1.0, prior_g=0.5, penalty_miss=-1.0, penalty_false_alarm=-1.0):
    return AuditorParams.dp_game(
        prior_g=prior_g,
        penalty_miss=penalty_miss,
        penalty_false_alarm=penalty_false_alarm,
        lam=lam,
    )


def random_hypotheses(rng: np.random.Generator, n: int) -> HypothesisPair:
    return HypothesisPair(q_g=rng.dirichlet(np.ones(n)), q_b=rng.dirichlet(np.ones(n)))


def fixed_confidence(r_g) -> AuditConfidence:
    """Wrap an arbitrary r(g|s) vector for developer-side tests."""
    r_g = np.asarray(r_g, dtype=float)
    return AuditConfidence(
        r_g=r_g,
        r_b=1.0 - r_g,
        normalizer=np.ones_like(r_g),
        prior_fallback=np.zeros(r_g.size, dtype=bool),
    )
