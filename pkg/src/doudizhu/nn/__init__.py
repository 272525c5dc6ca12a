from .layers import LSTM, MLP, Linear, sigmoid
from .losses import (NonFiniteLoss, check_finite, mse_loss,
                     weighted_bce_with_logits)
from .optim import RMSprop
from .models import (ACTION_WIDTH, DESK_PRESET, FULL_PRESET, PRESETS,
                     BidNetwork, QNetwork, ShapeMismatch, make_optimizer,
                     train_step_mse, train_step_weighted_bce)
from .gradcheck import gradient_check
from .checkpoint import (ChecksumMismatch, IoError, VersionMismatch,
                         load_checkpoint, save_checkpoint)

__all__ = [
    "LSTM", "MLP", "Linear", "sigmoid", "NonFiniteLoss", "check_finite",
    "mse_loss", "weighted_bce_with_logits", "RMSprop", "ACTION_WIDTH",
    "DESK_PRESET", "FULL_PRESET", "PRESETS", "BidNetwork", "QNetwork",
    "ShapeMismatch", "make_optimizer", "train_step_mse",
    "train_step_weighted_bce", "gradient_check", "ChecksumMismatch",
    "IoError", "VersionMismatch", "load_checkpoint", "save_checkpoint",
]
