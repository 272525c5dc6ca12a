from .config import InvalidConfig, TrainConfig
from .returns import NonTerminalEpisode, compute_returns, discounted_returns
from .episodes import EpisodeRecord, play_episode, make_nets
from .buffers import SharedBuffer, ParamStore
from .dmc import train_dmc, TrainHalted
from .sl import SLConfig, train_sl, EmptyCorpus
from .bidding import train_bidding, BidSample

__all__ = [
    "TrainConfig", "InvalidConfig", "NonTerminalEpisode", "compute_returns",
    "discounted_returns", "EpisodeRecord", "play_episode", "make_nets",
    "SharedBuffer", "ParamStore", "train_dmc", "TrainHalted", "SLConfig",
    "train_sl", "EmptyCorpus", "train_bidding", "BidSample",
]
