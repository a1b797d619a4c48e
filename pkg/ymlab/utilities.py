# Copyright 2024 ymlab developers

# Licensed under the Apache License, Version 2.0 (the "License"); you may not
# use this file except in compliance with the License. You may obtain a copy of
# the License at http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
# WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
# License for the specific language governing permissions and limitations under
# the License.

import hashlib
from concurrent.futures import ThreadPoolExecutor

import numpy as np


def wrap_displacement(displacement, period):
    # Nearest periodic image, mapped into [-period/2, period/2).
    displacement = np.asarray(displacement, dtype=float)
    return displacement - period * np.floor(displacement / period + 0.5)


def ordered_map(function, items, workers=1):
    """
    Apply ``function`` to every item and return the results in input order.

    With ``workers > 1`` the calls run on a thread pool; numpy releases the GIL
    inside the heavy array kernels, and the result order never depends on
    scheduling, so reductions over the returned list stay deterministic.
    """
    items = list(items)
    if workers is None or workers <= 1 or len(items) <= 1:
        return [function(item) for item in items]
    with ThreadPoolExecutor(max_workers=int(workers)) as pool:
        return list(pool.map(function, items))


def file_sha256(path, chunk_size=1 << 20):
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(chunk_size), b""):
            digest.update(chunk)
    return digest.hexdigest()
