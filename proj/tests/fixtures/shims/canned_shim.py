#!/usr/bin/env python3
# Copyright 2026 The qsynth Authors
#
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
"""Test-only fake shim: prints the "canned" object of meta.json verbatim."""

import json
import os
import sys

with open(os.path.join(sys.argv[1], "meta.json"), encoding="utf-8") as f:
    meta = json.load(f)
sys.stderr.write(meta.get("stderr", ""))
print("some chatter before the result")
print(json.dumps(meta["canned"]))
sys.exit(meta.get("exit", 0))
