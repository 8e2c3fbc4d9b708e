from .layers import (
    Conv2d,
    Dense,
    Dropout,
    Flatten,
    Layer,
    LayerStack,
    MaxPool2d,
    Relu,
    Softmax,
    Tanh,
    layer_from_spec,
)
from .losses import binary_cross_entropy, categorical_cross_entropy, categorical_cross_entropy_grad
from .optim import Adam, Optimizer, RMSprop, make_optimizer
from .checkpoint import read_container, write_container, save_stack, load_stack, restore_stack

__all__ = [
    "Adam", "Conv2d", "Dense", "Dropout", "Flatten", "Layer", "LayerStack",
    "MaxPool2d", "Optimizer", "Relu", "RMSprop", "Softmax", "Tanh",
    "binary_cross_entropy", "categorical_cross_entropy", "categorical_cross_entropy_grad",
    "layer_from_spec", "make_optimizer", "read_container", "write_container",
    "save_stack", "load_stack", "restore_stack",
]
