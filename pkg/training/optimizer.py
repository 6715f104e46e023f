# training/optimizer.py
from typing import Dict

import numpy as np

from core.tensor import Tensor


class Adam:
    """Adam with bias correction over a fixed, named parameter set"""

    def __init__(self, parameters: Dict[str, Tensor], learning_rate: float = 1e-3, beta1: float = 0.9,
                 beta2: float = 0.999, epsilon: float = 1e-8):
        self.parameters = parameters
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.steps = 0
        self.first = {name: np.zeros(t.shape) for name, t in parameters.items()}
        self.second = {name: np.zeros(t.shape) for name, t in parameters.items()}

    def step(self, grads: Dict[str, np.ndarray]):
        """Update every parameter in place; a missing gradient counts as zero"""
        self.steps += 1
        correction1 = 1.0 - self.beta1 ** self.steps
        correction2 = 1.0 - self.beta2 ** self.steps
        for name, tensor in self.parameters.items():
            grad = grads.get(name)
            if grad is None:
                grad = np.zeros(tensor.shape)
            self.first[name] = self.beta1 * self.first[name] + (1.0 - self.beta1) * grad
            self.second[name] = self.beta2 * self.second[name] + (1.0 - self.beta2) * grad * grad
            m_hat = self.first[name] / correction1
            v_hat = self.second[name] / correction2
            tensor.data -= self.learning_rate * m_hat / (np.sqrt(v_hat) + self.epsilon)
