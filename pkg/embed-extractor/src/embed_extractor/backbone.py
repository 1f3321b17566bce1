"""Frozen CNN backbone and its checkpoint format.

Checkpoints are torch files holding ``{"arch": {...}, "state_dict":
{...}}``. The arch block records the constructor arguments plus the
mel band count the network was trained on, so extraction can refuse a
front end that does not match.
"""

from __future__ import annotations

from pathlib import Path

import torch
from torch import nn


class BackboneError(Exception):
    """Checkpoint missing, malformed, or incompatible with the config."""


class MelCNN(nn.Module):
    """Small VGG-style tagger over log mel-spectrogram chunks.

    Stacked 3x3 conv + ReLU + 2x2 max-pool blocks, global average
    pooling, then a hidden linear layer whose ReLU output is the
    embedding. The classifier head on top exists so checkpoints look
    like a real tagging model; extraction never uses it.
    """

    def __init__(self, mel_bands: int, channels: tuple[int, ...], embed_dim: int, n_classes: int):
        super().__init__()
        if not channels:
            raise ValueError("channels must be non-empty")
        if embed_dim <= 0 or n_classes <= 0:
            raise ValueError("embed_dim and n_classes must be positive")
        self.mel_bands = mel_bands
        self.channels = tuple(int(c) for c in channels)
        self.embed_dim = int(embed_dim)
        self.n_classes = int(n_classes)

        blocks: list[nn.Module] = []
        in_ch = 1
        for out_ch in self.channels:
            blocks += [
                nn.Conv2d(in_ch, out_ch, kernel_size=3, padding=1),
                nn.ReLU(inplace=True),
                nn.MaxPool2d(2, ceil_mode=True),
            ]
            in_ch = out_ch
        self.features = nn.Sequential(*blocks)
        self.pool = nn.AdaptiveAvgPool2d((1, 1))
        self.hidden = nn.Linear(self.channels[-1], self.embed_dim)
        self.classifier = nn.Linear(self.embed_dim, self.n_classes)

    def embed(self, chunks: torch.Tensor) -> torch.Tensor:
        """Penultimate-layer activations, shape (batch, embed_dim).

        Input is (batch, mel_bands, frames) or (batch, 1, mel_bands,
        frames); a channel axis is added when missing.
        """
        if chunks.ndim == 3:
            chunks = chunks.unsqueeze(1)
        if chunks.shape[2] != self.mel_bands:
            raise BackboneError(
                f"backbone expects {self.mel_bands} mel bands, input has {chunks.shape[2]}"
            )
        x = self.pool(self.features(chunks)).flatten(1)
        return torch.relu(self.hidden(x))

    def forward(self, chunks: torch.Tensor) -> torch.Tensor:
        return self.classifier(self.embed(chunks))

    def arch(self) -> dict:
        return {
            "mel_bands": self.mel_bands,
            "channels": list(self.channels),
            "embed_dim": self.embed_dim,
            "n_classes": self.n_classes,
        }


def init_backbone(
    mel_bands: int,
    channels: tuple[int, ...] = (8, 16),
    embed_dim: int = 32,
    n_classes: int = 10,
    seed: int = 0,
) -> MelCNN:
    """Build a backbone with seeded random weights, in eval mode."""
    generator = torch.Generator().manual_seed(seed)
    model = MelCNN(mel_bands, channels, embed_dim, n_classes)
    with torch.no_grad():
        for param in model.parameters():
            param.copy_(torch.empty_like(param).normal_(0.0, 0.1, generator=generator))
    model.eval()
    return model


def save_backbone(model: MelCNN, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    torch.save({"arch": model.arch(), "state_dict": model.state_dict()}, path)


def load_backbone(path: Path, mel_bands: int | None = None) -> MelCNN:
    """Load a checkpoint and freeze it.

    When mel_bands is given it must equal the value stored in the
    checkpoint; the spectrogram front end and the backbone were fit
    together and must not drift apart.
    """
    if not Path(path).is_file():
        raise BackboneError(f"backbone checkpoint not found: {path}")
    try:
        payload = torch.load(path, map_location="cpu", weights_only=True)
    except Exception as exc:
        raise BackboneError(f"cannot read backbone checkpoint {path}: {exc}") from exc
    if not isinstance(payload, dict) or "arch" not in payload or "state_dict" not in payload:
        raise BackboneError(f"checkpoint {path} lacks arch/state_dict entries")
    arch = payload["arch"]
    try:
        model = MelCNN(
            mel_bands=int(arch["mel_bands"]),
            channels=tuple(arch["channels"]),
            embed_dim=int(arch["embed_dim"]),
            n_classes=int(arch["n_classes"]),
        )
        model.load_state_dict(payload["state_dict"], strict=True)
    except (KeyError, TypeError, ValueError, RuntimeError) as exc:
        raise BackboneError(f"checkpoint {path} does not describe a loadable backbone: {exc}") from exc
    if mel_bands is not None and model.mel_bands != mel_bands:
        raise BackboneError(
            f"backbone was trained on {model.mel_bands} mel bands, config asks for {mel_bands}"
        )
    model.eval()
    for param in model.parameters():
        param.requires_grad_(False)
    return model
