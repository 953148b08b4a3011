// Copyright 2026 The opsig Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace opsig {

/// Dalvik mnemonics indexed by opcode byte, in the uppercase/underscore
/// spelling used by listings. Unused opcodes are empty.
inline constexpr std::array<std::string_view, 256> dalvik_mnemonics = {
    "NOP", "MOVE", "MOVE_FROM16", "MOVE_16", // 00
    "MOVE_WIDE", "MOVE_WIDE_FROM16", "MOVE_WIDE_16", "MOVE_OBJECT", // 04
    "MOVE_OBJECT_FROM16", "MOVE_OBJECT_16", "MOVE_RESULT", "MOVE_RESULT_WIDE", // 08
    "MOVE_RESULT_OBJECT", "MOVE_EXCEPTION", "RETURN_VOID", "RETURN", // 0c
    "RETURN_WIDE", "RETURN_OBJECT", "CONST_4", "CONST_16", // 10
    "CONST", "CONST_HIGH16", "CONST_WIDE_16", "CONST_WIDE_32", // 14
    "CONST_WIDE", "CONST_WIDE_HIGH16", "CONST_STRING", "CONST_STRING_JUMBO", // 18
    "CONST_CLASS", "MONITOR_ENTER", "MONITOR_EXIT", "CHECK_CAST", // 1c
    "INSTANCE_OF", "ARRAY_LENGTH", "NEW_INSTANCE", "NEW_ARRAY", // 20
    "FILLED_NEW_ARRAY", "FILLED_NEW_ARRAY_RANGE", "FILL_ARRAY_DATA", "THROW", // 24
    "GOTO", "GOTO_16", "GOTO_32", "PACKED_SWITCH", // 28
    "SPARSE_SWITCH", "CMPL_FLOAT", "CMPG_FLOAT", "CMPL_DOUBLE", // 2c
    "CMPG_DOUBLE", "CMP_LONG", "IF_EQ", "IF_NE", // 30
    "IF_LT", "IF_GE", "IF_GT", "IF_LE", // 34
    "IF_EQZ", "IF_NEZ", "IF_LTZ", "IF_GEZ", // 38
    "IF_GTZ", "IF_LEZ", "", "", // 3c
    "", "", "", "", // 40
    "AGET", "AGET_WIDE", "AGET_OBJECT", "AGET_BOOLEAN", // 44
    "AGET_BYTE", "AGET_CHAR", "AGET_SHORT", "APUT", // 48
    "APUT_WIDE", "APUT_OBJECT", "APUT_BOOLEAN", "APUT_BYTE", // 4c
    "APUT_CHAR", "APUT_SHORT", "IGET", "IGET_WIDE", // 50
    "IGET_OBJECT", "IGET_BOOLEAN", "IGET_BYTE", "IGET_CHAR", // 54
    "IGET_SHORT", "IPUT", "IPUT_WIDE", "IPUT_OBJECT", // 58
    "IPUT_BOOLEAN", "IPUT_BYTE", "IPUT_CHAR", "IPUT_SHORT", // 5c
    "SGET", "SGET_WIDE", "SGET_OBJECT", "SGET_BOOLEAN", // 60
    "SGET_BYTE", "SGET_CHAR", "SGET_SHORT", "SPUT", // 64
    "SPUT_WIDE", "SPUT_OBJECT", "SPUT_BOOLEAN", "SPUT_BYTE", // 68
    "SPUT_CHAR", "SPUT_SHORT", "INVOKE_VIRTUAL", "INVOKE_SUPER", // 6c
    "INVOKE_DIRECT", "INVOKE_STATIC", "INVOKE_INTERFACE", "", // 70
    "INVOKE_VIRTUAL_RANGE", "INVOKE_SUPER_RANGE", "INVOKE_DIRECT_RANGE", "INVOKE_STATIC_RANGE", // 74
    "INVOKE_INTERFACE_RANGE", "", "", "NEG_INT", // 78
    "NOT_INT", "NEG_LONG", "NOT_LONG", "NEG_FLOAT", // 7c
    "NEG_DOUBLE", "INT_TO_LONG", "INT_TO_FLOAT", "INT_TO_DOUBLE", // 80
    "LONG_TO_INT", "LONG_TO_FLOAT", "LONG_TO_DOUBLE", "FLOAT_TO_INT", // 84
    "FLOAT_TO_LONG", "FLOAT_TO_DOUBLE", "DOUBLE_TO_INT", "DOUBLE_TO_LONG", // 88
    "DOUBLE_TO_FLOAT", "INT_TO_BYTE", "INT_TO_CHAR", "INT_TO_SHORT", // 8c
    "ADD_INT", "SUB_INT", "MUL_INT", "DIV_INT", // 90
    "REM_INT", "AND_INT", "OR_INT", "XOR_INT", // 94
    "SHL_INT", "SHR_INT", "USHR_INT", "ADD_LONG", // 98
    "SUB_LONG", "MUL_LONG", "DIV_LONG", "REM_LONG", // 9c
    "AND_LONG", "OR_LONG", "XOR_LONG", "SHL_LONG", // a0
    "SHR_LONG", "USHR_LONG", "ADD_FLOAT", "SUB_FLOAT", // a4
    "MUL_FLOAT", "DIV_FLOAT", "REM_FLOAT", "ADD_DOUBLE", // a8
    "SUB_DOUBLE", "MUL_DOUBLE", "DIV_DOUBLE", "REM_DOUBLE", // ac
    "ADD_INT_2ADDR", "SUB_INT_2ADDR", "MUL_INT_2ADDR", "DIV_INT_2ADDR", // b0
    "REM_INT_2ADDR", "AND_INT_2ADDR", "OR_INT_2ADDR", "XOR_INT_2ADDR", // b4
    "SHL_INT_2ADDR", "SHR_INT_2ADDR", "USHR_INT_2ADDR", "ADD_LONG_2ADDR", // b8
    "SUB_LONG_2ADDR", "MUL_LONG_2ADDR", "DIV_LONG_2ADDR", "REM_LONG_2ADDR", // bc
    "AND_LONG_2ADDR", "OR_LONG_2ADDR", "XOR_LONG_2ADDR", "SHL_LONG_2ADDR", // c0
    "SHR_LONG_2ADDR", "USHR_LONG_2ADDR", "ADD_FLOAT_2ADDR", "SUB_FLOAT_2ADDR", // c4
    "MUL_FLOAT_2ADDR", "DIV_FLOAT_2ADDR", "REM_FLOAT_2ADDR", "ADD_DOUBLE_2ADDR", // c8
    "SUB_DOUBLE_2ADDR", "MUL_DOUBLE_2ADDR", "DIV_DOUBLE_2ADDR", "REM_DOUBLE_2ADDR", // cc
    "ADD_INT_LIT16", "RSUB_INT", "MUL_INT_LIT16", "DIV_INT_LIT16", // d0
    "REM_INT_LIT16", "AND_INT_LIT16", "OR_INT_LIT16", "XOR_INT_LIT16", // d4
    "ADD_INT_LIT8", "RSUB_INT_LIT8", "MUL_INT_LIT8", "DIV_INT_LIT8", // d8
    "REM_INT_LIT8", "AND_INT_LIT8", "OR_INT_LIT8", "XOR_INT_LIT8", // dc
    "SHL_INT_LIT8", "SHR_INT_LIT8", "USHR_INT_LIT8", "", // e0
    "", "", "", "", // e4
    "", "", "", "", // e8
    "", "", "", "", // ec
    "", "", "", "", // f0
    "", "", "", "", // f4
    "", "", "INVOKE_POLYMORPHIC", "INVOKE_POLYMORPHIC_RANGE", // f8
    "INVOKE_CUSTOM", "INVOKE_CUSTOM_RANGE", "CONST_METHOD_HANDLE", "CONST_METHOD_TYPE", // fc
};

inline bool is_known_mnemonic(std::string_view mnemonic)
{
    if (mnemonic.empty()) {
        return false;
    }
    for (auto m : dalvik_mnemonics) {
        if (m == mnemonic) {
            return true;
        }
    }
    return false;
}

inline std::optional<unsigned> opcode_of(std::string_view mnemonic)
{
    for (unsigned op = 0; op < dalvik_mnemonics.size(); ++op) {
        if (!mnemonic.empty() && dalvik_mnemonics[op] == mnemonic) {
            return op;
        }
    }
    return std::nullopt;
}

} // namespace opsig
