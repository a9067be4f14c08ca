// Copyright (c) 2026 softcreep contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace softcreep {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace softcreep
