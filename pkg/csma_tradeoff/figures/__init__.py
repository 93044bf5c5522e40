# Copyright 2025, Adria Cloud Services.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import importlib
import inspect
import pkgutil

from csma_tradeoff.common.exceptions import DomainError
from csma_tradeoff.figures.base import FigureBase

# Import every module in this directory so each figure registers itself
# as an attribute of the package.
for _, name, _ in pkgutil.iter_modules(__path__):
    importlib.import_module(f".{name}", __name__)


def available_figures() -> list[str]:
    return sorted(cls.FIGURE_NAME for cls in _figure_classes())


def _figure_classes():
    package = importlib.import_module(__name__)
    for _, module in inspect.getmembers(package, inspect.ismodule):
        for _, class_obj in inspect.getmembers(module, inspect.isclass):
            if issubclass(class_obj, FigureBase) and class_obj.FIGURE_NAME:
                yield class_obj


def get_figure(name: str, **overrides) -> FigureBase:
    """Finds the figure class whose FIGURE_NAME matches and instantiates it."""
    for class_obj in _figure_classes():
        if class_obj.FIGURE_NAME == name:
            return class_obj(**overrides)
    raise DomainError(f"Unknown figure {name!r}; choose from {', '.join(available_figures())}")
