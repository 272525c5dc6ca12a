"""DouDizhu: rules engine, encoders, from-scratch networks, self-play
training, agents, tournaments, and a small game service."""

__version__ = "0.1.0"

from .cards import format_cards, parse_cards
from .combos import Category, Combo, action_space, beats, classify
from .game import GameState, MatchResult, Phase, Role, Side, terminal_reward

__all__ = [
    "__version__", "format_cards", "parse_cards", "Category", "Combo",
    "action_space", "beats", "classify", "GameState", "MatchResult",
    "Phase", "Role", "Side", "terminal_reward",
]
