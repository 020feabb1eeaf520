"""Named hyperparameter presets for the comparative experiments.

One preset per (offered load, learning algorithm): the tuned exploration,
reward, and learning-rate settings used for the headline comparisons, plus
bare presets for the deterministic baselines. Values are per-experiment
hyperparameters; anything can still be overridden in a config file.
"""

from __future__ import annotations

from .agents import EGREEDY, KSP_FF, KSP_INF, QLEARNING, SPF_FF, UCB

# Tuned RL settings per offered load (Erlang). The UCB exploration constant
# defaults to 2 at every load.
_RL_PRESETS: dict[tuple[int, str], dict] = {
    (500, EGREEDY): dict(epsilon_start=0.01, epsilon_mode="constant",
                         reward_routed=1.0, reward_blocked=-100.0),
    (500, UCB): dict(epsilon_start=0.20, epsilon_mode="constant", c=2.0,
                     reward_routed=1.0, reward_blocked=-10.0),
    (500, QLEARNING): dict(epsilon_start=0.10, epsilon_end=0.05, epsilon_mode="linear",
                           alpha=0.05, gamma=0.01,
                           reward_routed=1.0, reward_blocked=-100.0),
    (750, EGREEDY): dict(epsilon_start=0.06, epsilon_mode="constant",
                         reward_routed=10.0, reward_blocked=-100.0),
    (750, UCB): dict(epsilon_start=0.10, epsilon_mode="constant", c=2.0,
                     reward_routed=10.0, reward_blocked=-10.0),
    (750, QLEARNING): dict(epsilon_start=0.20, epsilon_end=0.05, epsilon_mode="linear",
                           alpha=0.01, gamma=0.95,
                           reward_routed=10.0, reward_blocked=-100.0),
    (1000, EGREEDY): dict(epsilon_start=0.01, epsilon_mode="constant",
                          reward_routed=0.0, reward_blocked=-10.0),
    (1000, UCB): dict(epsilon_start=0.20, epsilon_mode="constant", c=2.0,
                      reward_routed=10.0, reward_blocked=-10.0),
    (1000, QLEARNING): dict(epsilon_start=0.05, epsilon_mode="constant",
                            alpha=0.05, gamma=0.01,
                            reward_routed=1.0, reward_blocked=-10.0),
}

_NAME_BY_ALGORITHM = {
    EGREEDY: "egreedy",
    UCB: "ucb",
    QLEARNING: "qlearning",
    SPF_FF: "spf-ff",
    KSP_FF: "ksp-ff",
    KSP_INF: "ksp-inf",
}


def _build_registry() -> dict[str, dict]:
    registry: dict[str, dict] = {}
    for (erlang, algorithm), params in _RL_PRESETS.items():
        name = f"erlang{erlang}-{_NAME_BY_ALGORITHM[algorithm]}"
        registry[name] = dict(erlang=erlang, algorithm=algorithm, **params)
    for erlang in (500, 750, 1000):
        for algorithm in (SPF_FF, KSP_FF, KSP_INF):
            name = f"erlang{erlang}-{_NAME_BY_ALGORITHM[algorithm]}"
            registry[name] = dict(erlang=erlang, algorithm=algorithm)
    return registry


PRESETS: dict[str, dict] = _build_registry()


def preset_names() -> list[str]:
    return sorted(PRESETS)


def get_preset(name: str) -> dict:
    try:
        return dict(PRESETS[name])
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; known presets: {', '.join(preset_names())}") from None


def rl_preset_for(erlang: float, algorithm: str) -> dict | None:
    """Tuned settings for (erlang, algorithm), or None if not a preset point."""
    key = (int(erlang), algorithm)
    if key in _RL_PRESETS and erlang == int(erlang):
        return dict(_RL_PRESETS[key])
    return None
