# Copyright 2026 The oodkit Authors.
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Out-of-distribution scoring and evaluation on precomputed embeddings."""

from oodkit._oodkit import (
    OodkitError,
    auprc,
    auroc,
    fit_gaussian,
    fpr_at_tpr,
    load_embeddings,
    load_gaussian,
    load_head,
    save_embeddings,
    score_in_mass,
    score_maha,
    score_msp,
    score_oe,
    score_zshot,
    softmax,
    train_oe_head,
)

__all__ = [
    "OodkitError",
    "auprc",
    "auroc",
    "fit_gaussian",
    "fpr_at_tpr",
    "load_embeddings",
    "load_gaussian",
    "load_head",
    "save_embeddings",
    "score_in_mass",
    "score_maha",
    "score_msp",
    "score_oe",
    "score_zshot",
    "softmax",
    "train_oe_head",
]
