# Copyright (c) 2026 The psnet Authors
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
"""Learned point sampling and grouping for point clouds."""

from ._psnet import (
    Error,
    SftfParams,
    ball_query,
    default_channels,
    fps,
    fps_ball_query_sample_and_group,
    fps_knn,
    knn,
    make_features,
    membership,
    sample_and_group,
    structure,
    symmetry_error_rate,
)

__all__ = [
    "Error",
    "SftfParams",
    "ball_query",
    "default_channels",
    "fps",
    "fps_ball_query_sample_and_group",
    "fps_knn",
    "knn",
    "make_features",
    "membership",
    "sample_and_group",
    "structure",
    "symmetry_error_rate",
]
