# network/context_block.py
"""Residual context block used by every encoder level."""

from core.ops import add, leaky_relu
from core.tensor import Tensor
from network.layers import Conv3d, InstanceNorm, ParameterStore


class ContextBlock:
    """
    Pre-activation residual unit: {instance_norm -> LeakyReLU -> 3^3 conv} x 2.

    With equal widths the residual branch is the block input; when the width
    changes it is the first convolution's output.
    """

    def __init__(self, store: ParameterStore, name: str, in_channels: int, out_channels: int,
                 leaky_slope: float = 0.01):
        self.name = name
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.leaky_slope = leaky_slope
        self.norm1 = InstanceNorm(store, f"{name}.norm1", in_channels)
        self.conv1 = Conv3d(store, f"{name}.conv1", in_channels, out_channels)
        self.norm2 = InstanceNorm(store, f"{name}.norm2", out_channels)
        self.conv2 = Conv3d(store, f"{name}.conv2", out_channels, out_channels)

    def __call__(self, x: Tensor) -> Tensor:
        h = self.conv1(leaky_relu(self.norm1(x), self.leaky_slope))
        y = self.conv2(leaky_relu(self.norm2(h), self.leaky_slope))
        residual = x if self.in_channels == self.out_channels else h
        return add(y, residual)


class LocalizationBlock:
    """Decoder unit: IN -> LeakyReLU -> 3^3 conv (2C -> C), then IN -> LeakyReLU -> 1^3 conv"""

    def __init__(self, store: ParameterStore, name: str, in_channels: int, out_channels: int,
                 leaky_slope: float = 0.01):
        self.leaky_slope = leaky_slope
        self.norm1 = InstanceNorm(store, f"{name}.norm1", in_channels)
        self.conv1 = Conv3d(store, f"{name}.conv1", in_channels, out_channels)
        self.norm2 = InstanceNorm(store, f"{name}.norm2", out_channels)
        self.conv2 = Conv3d(store, f"{name}.conv2", out_channels, out_channels, kernel=1)

    def __call__(self, x: Tensor) -> Tensor:
        h = self.conv1(leaky_relu(self.norm1(x), self.leaky_slope))
        return self.conv2(leaky_relu(self.norm2(h), self.leaky_slope))
