// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#include <tcpa/wasm/assembler.hpp>
#include <tcpa/wasm/encoder.hpp>

#include <charconv>
#include <map>
#include <optional>

namespace tcpa::wasm
{
namespace
{
using Kind = AsmError::Kind;

struct Token
{
    enum class Type
    {
        lparen,
        rparen,
        word,
        name,  // $identifier, text stored without the sigil
        str,
        eof,
    };

    Type type = Type::eof;
    std::string text;
    uint32_t line = 1;
    uint32_t col = 1;
};

[[noreturn]] void err(Kind kind, const std::string& msg, const Token& at)
{
    throw AsmError{kind, msg, at.line, at.col};
}

class Lexer
{
public:
    explicit Lexer(std::string_view src) : m_src{src} {}

    Token next()
    {
        skip_space_and_comments();
        Token tok;
        tok.line = m_line;
        tok.col = m_col;
        if (m_pos >= m_src.size())
            return tok;

        const char c = m_src[m_pos];
        if (c == '(')
        {
            advance();
            tok.type = Token::Type::lparen;
            return tok;
        }
        if (c == ')')
        {
            advance();
            tok.type = Token::Type::rparen;
            return tok;
        }
        if (c == '"')
            return lex_string(tok);

        std::string text;
        while (m_pos < m_src.size())
        {
            const char d = m_src[m_pos];
            if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' ||
                d == '"' || d == ';')
                break;
            text += d;
            advance();
        }
        if (text.empty())
            throw AsmError{Kind::SyntaxError, "unexpected character", tok.line, tok.col};
        if (text[0] == '$')
        {
            if (text.size() == 1)
                throw AsmError{Kind::SyntaxError, "empty identifier", tok.line, tok.col};
            tok.type = Token::Type::name;
            tok.text = text.substr(1);
        }
        else
        {
            tok.type = Token::Type::word;
            tok.text = std::move(text);
        }
        return tok;
    }

private:
    void advance()
    {
        if (m_src[m_pos] == '\n')
        {
            ++m_line;
            m_col = 1;
        }
        else
        {
            ++m_col;
        }
        ++m_pos;
    }

    void skip_space_and_comments()
    {
        while (m_pos < m_src.size())
        {
            const char c = m_src[m_pos];
            if (std::isspace(static_cast<unsigned char>(c)))
            {
                advance();
            }
            else if (c == ';' && m_pos + 1 < m_src.size() && m_src[m_pos + 1] == ';')
            {
                while (m_pos < m_src.size() && m_src[m_pos] != '\n')
                    advance();
            }
            else if (c == '(' && m_pos + 1 < m_src.size() && m_src[m_pos + 1] == ';')
            {
                const uint32_t line = m_line, col = m_col;
                advance();
                advance();
                int depth = 1;
                while (depth > 0)
                {
                    if (m_pos >= m_src.size())
                        throw AsmError{Kind::SyntaxError, "unterminated block comment", line,
                            col};
                    if (m_src[m_pos] == '(' && m_pos + 1 < m_src.size() &&
                        m_src[m_pos + 1] == ';')
                    {
                        ++depth;
                        advance();
                        advance();
                    }
                    else if (m_src[m_pos] == ';' && m_pos + 1 < m_src.size() &&
                             m_src[m_pos + 1] == ')')
                    {
                        --depth;
                        advance();
                        advance();
                    }
                    else
                    {
                        advance();
                    }
                }
            }
            else
            {
                return;
            }
        }
    }

    Token lex_string(Token tok)
    {
        advance();  // opening quote
        tok.type = Token::Type::str;
        while (true)
        {
            if (m_pos >= m_src.size() || m_src[m_pos] == '\n')
                throw AsmError{Kind::SyntaxError, "unterminated string", tok.line, tok.col};
            const char c = m_src[m_pos];
            advance();
            if (c == '"')
                return tok;
            if (c != '\\')
            {
                tok.text += c;
                continue;
            }
            if (m_pos >= m_src.size())
                throw AsmError{Kind::SyntaxError, "unterminated string", tok.line, tok.col};
            const char esc = m_src[m_pos];
            advance();
            switch (esc)
            {
            case '\\':
                tok.text += '\\';
                break;
            case '"':
                tok.text += '"';
                break;
            case 'n':
                tok.text += '\n';
                break;
            case 't':
                tok.text += '\t';
                break;
            default:
            {
                const auto hex = [](char h) -> int {
                    if (h >= '0' && h <= '9')
                        return h - '0';
                    if (h >= 'a' && h <= 'f')
                        return h - 'a' + 10;
                    if (h >= 'A' && h <= 'F')
                        return h - 'A' + 10;
                    return -1;
                };
                const int hi = hex(esc);
                const int lo = m_pos < m_src.size() ? hex(m_src[m_pos]) : -1;
                if (hi < 0 || lo < 0)
                    throw AsmError{
                        Kind::SyntaxError, "invalid string escape", tok.line, tok.col};
                advance();
                tok.text += static_cast<char>(hi * 16 + lo);
                break;
            }
            }
        }
    }

    std::string_view m_src;
    size_t m_pos = 0;
    uint32_t m_line = 1;
    uint32_t m_col = 1;
};

bool looks_numeric(const Token& t)
{
    if (t.type != Token::Type::word || t.text.empty())
        return false;
    size_t i = t.text[0] == '-' || t.text[0] == '+' ? 1 : 0;
    return i < t.text.size() && std::isdigit(static_cast<unsigned char>(t.text[i]));
}

/// Integer literal as a `bits`-wide bit pattern. Accepts the union of the
/// signed and unsigned ranges; underscores group digits.
uint64_t parse_int(const Token& t, unsigned bits)
{
    std::string_view s = t.text;
    bool neg = false;
    if (!s.empty() && (s[0] == '-' || s[0] == '+'))
    {
        neg = s[0] == '-';
        s.remove_prefix(1);
    }
    int base = 10;
    if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X'))
    {
        base = 16;
        s.remove_prefix(2);
    }
    std::string digits;
    for (const char c : s)
        if (c != '_')
            digits += c;

    uint64_t mag = 0;
    const auto [ptr, ec] =
        std::from_chars(digits.data(), digits.data() + digits.size(), mag, base);
    if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size())
        err(Kind::SyntaxError, "expected integer, found '" + t.text + "'", t);

    const uint64_t mask = bits == 64 ? ~uint64_t{0} : (uint64_t{1} << bits) - 1;
    if (!neg)
    {
        if (mag > mask)
            err(Kind::SyntaxError, "integer out of range for i" + std::to_string(bits), t);
        return mag;
    }
    const uint64_t limit = uint64_t{1} << (bits - 1);
    if (mag > limit)
        err(Kind::SyntaxError, "integer out of range for i" + std::to_string(bits), t);
    return (~mag + 1) & mask;
}

uint32_t parse_index(const Token& t)
{
    if (!t.text.empty() && t.text[0] == '-')
        err(Kind::SyntaxError, "index must be non-negative", t);
    return static_cast<uint32_t>(parse_int(t, 32));
}

/// Named or numeric reference, resolved after all declarations are known.
struct Ref
{
    std::string name;  // empty when numeric
    uint32_t index = 0;
    uint32_t line = 1;
    uint32_t col = 1;

    bool is_name() const noexcept { return !name.empty(); }
};

struct PendingIns
{
    Opcode op = Opcode::nop;
    uint64_t imm0 = 0;
    uint64_t imm1 = 0;
    std::vector<uint32_t> table;
    Ref ref;  // call target or global reference
    FunctionType ci_type;
    uint32_t line = 1;
    uint32_t col = 1;
};

struct PendingFunc
{
    std::string name;
    std::vector<std::string> export_names;
    FunctionType type;
    std::vector<ValType> locals;
    std::map<std::string, uint32_t> local_names;
    std::vector<PendingIns> instrs;
    uint32_t line = 1;
    uint32_t col = 1;
};

struct PendingImport
{
    std::string module_name;
    std::string field_name;
    std::string name;
    FunctionType type;
    Token at;
};

struct PendingExport
{
    std::string export_name;
    Ref func;
};

const std::map<std::string, Opcode>& mnemonics()
{
    static const std::map<std::string, Opcode> table = [] {
        std::map<std::string, Opcode> t;
        for (int byte = 0; byte < 256; ++byte)
        {
            if (const OpcodeInfo* info = opcode_info(static_cast<uint8_t>(byte)))
                t.emplace(info->name, static_cast<Opcode>(byte));
        }
        return t;
    }();
    return table;
}

class TextParser
{
public:
    explicit TextParser(std::string_view src) : m_lex{src}
    {
        m_tok = m_lex.next();
        m_next = m_lex.next();
    }

    AssembledModule run();

private:
    Token take()
    {
        Token t = std::move(m_tok);
        m_tok = std::move(m_next);
        m_next = m_lex.next();
        return t;
    }

    void expect_lparen()
    {
        if (m_tok.type != Token::Type::lparen)
            err(Kind::SyntaxError, "expected '('", m_tok);
        take();
    }

    void expect_rparen()
    {
        if (m_tok.type != Token::Type::rparen)
            err(Kind::SyntaxError, "expected ')'", m_tok);
        take();
    }

    Token expect_word()
    {
        if (m_tok.type != Token::Type::word)
            err(Kind::SyntaxError, "expected keyword", m_tok);
        return take();
    }

    Token expect_str()
    {
        if (m_tok.type != Token::Type::str)
            err(Kind::SyntaxError, "expected string", m_tok);
        return take();
    }

    /// True when the upcoming tokens are `(<keyword> ...`.
    bool at_group(std::string_view keyword) const
    {
        return m_tok.type == Token::Type::lparen && m_next.type == Token::Type::word &&
               m_next.text == keyword;
    }

    ValType parse_valtype()
    {
        const Token t = expect_word();
        if (t.text == "i32")
            return ValType::i32;
        if (t.text == "i64")
            return ValType::i64;
        if (t.text == "f32")
            return ValType::f32;
        if (t.text == "f64")
            return ValType::f64;
        err(Kind::SyntaxError, "expected value type, found '" + t.text + "'", t);
    }

    Ref parse_ref()
    {
        if (m_tok.type == Token::Type::name)
        {
            const Token t = take();
            return Ref{t.text, 0, t.line, t.col};
        }
        if (looks_numeric(m_tok))
        {
            const Token t = take();
            return Ref{{}, parse_index(t), t.line, t.col};
        }
        err(Kind::SyntaxError, "expected index or $name", m_tok);
    }

    void parse_module();
    void parse_func();
    void parse_import();
    void parse_global();
    void parse_memory();
    void parse_table();
    void parse_start();
    void parse_export();
    void parse_params_into(FunctionType& ft, PendingFunc* f);
    void parse_locals_into(PendingFunc& f);
    void parse_body(PendingFunc& f);
    PendingIns parse_instruction(std::vector<std::string>& labels, const PendingFunc& f);
    uint32_t resolve_label(const Token& t, const std::vector<std::string>& labels);

    Lexer m_lex;
    Token m_tok;
    Token m_next;
    /// Label bound by the most recently parsed block/loop/if, if any.
    std::string m_label_binding;

    std::vector<PendingImport> m_imports;
    std::vector<PendingFunc> m_funcs;
    std::vector<std::pair<std::string, GlobalSpec>> m_globals;  // name may be empty
    std::optional<MemorySpec> m_memory;
    std::optional<std::vector<Ref>> m_table;
    std::optional<Ref> m_start;
    std::vector<PendingExport> m_exports;
};

void TextParser::parse_module()
{
    expect_lparen();
    const Token head = expect_word();
    if (head.text != "module")
        err(Kind::SyntaxError, "expected (module ...)", head);

    while (m_tok.type != Token::Type::rparen)
    {
        expect_lparen();
        const Token field = expect_word();
        if (field.text == "func")
            parse_func();
        else if (field.text == "import")
            parse_import();
        else if (field.text == "global")
            parse_global();
        else if (field.text == "memory")
            parse_memory();
        else if (field.text == "table")
            parse_table();
        else if (field.text == "start")
            parse_start();
        else if (field.text == "export")
            parse_export();
        else
            err(Kind::UnsupportedConstruct, "unsupported module field '" + field.text + "'",
                field);
    }
    expect_rparen();
    if (m_tok.type != Token::Type::eof)
        err(Kind::SyntaxError, "unexpected input after (module ...)", m_tok);
}

void TextParser::parse_params_into(FunctionType& ft, PendingFunc* f)
{
    while (at_group("param"))
    {
        expect_lparen();
        take();  // param
        if (m_tok.type == Token::Type::name)
        {
            const Token nm = take();
            const ValType t = parse_valtype();
            if (f)
            {
                if (!f->local_names.emplace(nm.text, static_cast<uint32_t>(ft.params.size()))
                         .second)
                    err(Kind::SyntaxError, "duplicate parameter $" + nm.text, nm);
            }
            ft.params.push_back(t);
        }
        else
        {
            while (m_tok.type != Token::Type::rparen)
                ft.params.push_back(parse_valtype());
        }
        expect_rparen();
    }
    if (at_group("result"))
    {
        expect_lparen();
        take();  // result
        while (m_tok.type != Token::Type::rparen)
        {
            if (!ft.results.empty())
                err(Kind::UnsupportedConstruct, "multiple results", m_tok);
            ft.results.push_back(parse_valtype());
        }
        expect_rparen();
    }
}

void TextParser::parse_locals_into(PendingFunc& f)
{
    while (at_group("local"))
    {
        expect_lparen();
        take();  // local
        if (m_tok.type == Token::Type::name)
        {
            const Token nm = take();
            const ValType t = parse_valtype();
            const auto index =
                static_cast<uint32_t>(f.type.params.size() + f.locals.size());
            if (!f.local_names.emplace(nm.text, index).second)
                err(Kind::SyntaxError, "duplicate local $" + nm.text, nm);
            f.locals.push_back(t);
        }
        else
        {
            while (m_tok.type != Token::Type::rparen)
                f.locals.push_back(parse_valtype());
        }
        expect_rparen();
    }
}

void TextParser::parse_func()
{
    PendingFunc f;
    f.line = m_tok.line;
    f.col = m_tok.col;
    if (m_tok.type == Token::Type::name)
        f.name = take().text;

    while (at_group("export"))
    {
        expect_lparen();
        take();  // export
        f.export_names.push_back(expect_str().text);
        expect_rparen();
    }

    parse_params_into(f.type, &f);
    parse_locals_into(f);
    parse_body(f);
    expect_rparen();
    m_funcs.push_back(std::move(f));
}

void TextParser::parse_body(PendingFunc& f)
{
    std::vector<std::string> labels;
    while (m_tok.type != Token::Type::rparen)
    {
        if (m_tok.type == Token::Type::lparen)
            err(Kind::UnsupportedConstruct, "folded instruction form", m_tok);
        f.instrs.push_back(parse_instruction(labels, f));
        const PendingIns& ins = f.instrs.back();
        if (ins.op == Opcode::block || ins.op == Opcode::loop || ins.op == Opcode::if_)
            labels.push_back(m_label_binding);
        else if (ins.op == Opcode::end)
        {
            if (labels.empty())
                throw AsmError{Kind::SyntaxError, "end without open block", ins.line, ins.col};
            labels.pop_back();
        }
    }
    if (!labels.empty())
        err(Kind::SyntaxError, "unterminated block", m_tok);

    // Implicit function-closing end at the closing parenthesis.
    PendingIns endin;
    endin.op = Opcode::end;
    endin.line = m_tok.line;
    endin.col = m_tok.col;
    f.instrs.push_back(endin);
}

uint32_t TextParser::resolve_label(const Token& t, const std::vector<std::string>& labels)
{
    for (size_t k = 0; k < labels.size(); ++k)
    {
        const std::string& candidate = labels[labels.size() - 1 - k];
        if (!candidate.empty() && candidate == t.text)
            return static_cast<uint32_t>(k);
    }
    err(Kind::SyntaxError, "undefined label $" + t.text, t);
}

PendingIns TextParser::parse_instruction(std::vector<std::string>& labels, const PendingFunc& f)
{
    const Token mnemonic = expect_word();
    const auto& table = mnemonics();
    const auto it = table.find(mnemonic.text);
    if (it == table.end())
    {
        // Distinguish real wasm mnemonics outside the subset from typos.
        const bool wasm_like = mnemonic.text.find('.') != std::string::npos ||
                               mnemonic.text == "memory.grow" || mnemonic.text == "memory.size";
        err(wasm_like ? Kind::UnsupportedConstruct : Kind::SyntaxError,
            "unknown instruction '" + mnemonic.text + "'", mnemonic);
    }

    PendingIns ins;
    ins.op = it->second;
    ins.line = mnemonic.line;
    ins.col = mnemonic.col;
    m_label_binding.clear();

    switch (opcode_info(ins.op).imm)
    {
    case ImmKind::none:
        break;
    case ImmKind::block_type:
    {
        if (m_tok.type == Token::Type::name)
            m_label_binding = take().text;
        ins.imm0 = 0x40;
        if (at_group("result"))
        {
            expect_lparen();
            take();
            const Token rt = m_tok;
            const ValType t = parse_valtype();
            if (t == ValType::i32)
                ins.imm0 = 0x7F;
            else if (t == ValType::i64)
                ins.imm0 = 0x7E;
            else
                err(Kind::UnsupportedConstruct, "float block results", rt);
            expect_rparen();
        }
        break;
    }
    case ImmKind::label:
        if (m_tok.type == Token::Type::name)
            ins.imm0 = resolve_label(take(), labels);
        else if (looks_numeric(m_tok))
            ins.imm0 = parse_index(take());
        else
            err(Kind::SyntaxError, "expected branch target", m_tok);
        break;
    case ImmKind::br_table:
    {
        std::vector<uint32_t> targets;
        while (m_tok.type == Token::Type::name || looks_numeric(m_tok))
        {
            if (m_tok.type == Token::Type::name)
                targets.push_back(resolve_label(take(), labels));
            else
                targets.push_back(parse_index(take()));
        }
        if (targets.empty())
            err(Kind::SyntaxError, "br_table requires at least one target", m_tok);
        ins.imm0 = targets.back();
        targets.pop_back();
        ins.table = std::move(targets);
        break;
    }
    case ImmKind::func_idx:
        ins.ref = parse_ref();
        break;
    case ImmKind::call_indirect:
        if (at_group("type"))
            err(Kind::UnsupportedConstruct, "type references", m_tok);
        parse_params_into(ins.ci_type, nullptr);
        break;
    case ImmKind::local_idx:
        if (m_tok.type == Token::Type::name)
        {
            const Token nm = take();
            const auto lit = f.local_names.find(nm.text);
            if (lit == f.local_names.end())
                err(Kind::SyntaxError, "undefined local $" + nm.text, nm);
            ins.imm0 = lit->second;
        }
        else if (looks_numeric(m_tok))
        {
            ins.imm0 = parse_index(take());
        }
        else
        {
            err(Kind::SyntaxError, "expected local index or $name", m_tok);
        }
        break;
    case ImmKind::global_idx:
        ins.ref = parse_ref();
        break;
    case ImmKind::mem_arg:
    {
        const bool is64 = ins.op == Opcode::i64_load || ins.op == Opcode::i64_store;
        uint64_t align_bytes = is64 ? 8 : 4;
        uint64_t offset = 0;
        bool seen_offset = false, seen_align = false;
        while (m_tok.type == Token::Type::word &&
               (m_tok.text.rfind("offset=", 0) == 0 || m_tok.text.rfind("align=", 0) == 0))
        {
            const Token t = take();
            Token value = t;
            const bool is_offset = t.text.rfind("offset=", 0) == 0;
            value.text = t.text.substr(is_offset ? 7 : 6);
            if (is_offset)
            {
                if (seen_offset)
                    err(Kind::SyntaxError, "duplicate offset", t);
                seen_offset = true;
                offset = parse_index(value);
            }
            else
            {
                if (seen_align)
                    err(Kind::SyntaxError, "duplicate align", t);
                seen_align = true;
                align_bytes = parse_index(value);
            }
        }
        uint64_t align_log2 = 0;
        while ((uint64_t{1} << align_log2) < align_bytes)
            ++align_log2;
        if ((uint64_t{1} << align_log2) != align_bytes || align_bytes == 0)
            err(Kind::SyntaxError, "alignment must be a power of two", mnemonic);
        ins.imm0 = align_log2;
        ins.imm1 = offset;
        break;
    }
    case ImmKind::const_i32:
    {
        if (!looks_numeric(m_tok))
            err(Kind::SyntaxError, "expected integer constant", m_tok);
        ins.imm0 = parse_int(take(), 32);
        break;
    }
    case ImmKind::const_i64:
    {
        if (!looks_numeric(m_tok))
            err(Kind::SyntaxError, "expected integer constant", m_tok);
        ins.imm0 = parse_int(take(), 64);
        break;
    }
    }
    return ins;
}

void TextParser::parse_import()
{
    const Token at = m_tok;
    const std::string module_name = expect_str().text;
    const std::string field_name = expect_str().text;
    if (module_name != "env" || field_name != "tcpa_assert")
        err(Kind::UnsupportedConstruct,
            "unsupported import " + module_name + "." + field_name, at);

    expect_lparen();
    const Token desc = expect_word();
    if (desc.text != "func")
        err(Kind::UnsupportedConstruct, "only function imports are supported", desc);
    PendingImport imp;
    imp.module_name = module_name;
    imp.field_name = field_name;
    imp.at = at;
    if (m_tok.type == Token::Type::name)
        imp.name = take().text;
    parse_params_into(imp.type, nullptr);
    expect_rparen();
    expect_rparen();
    m_imports.push_back(std::move(imp));
}

void TextParser::parse_global()
{
    std::string name;
    if (m_tok.type == Token::Type::name)
        name = take().text;

    GlobalSpec g;
    if (at_group("mut"))
    {
        expect_lparen();
        take();
        g.is_mutable = true;
        g.type = parse_valtype();
        expect_rparen();
    }
    else
    {
        g.type = parse_valtype();
    }

    expect_lparen();
    const Token init = expect_word();
    unsigned bits = 0;
    if (init.text == "i32.const")
        bits = 32;
    else if (init.text == "i64.const")
        bits = 64;
    else
        err(Kind::SyntaxError, "expected i32.const or i64.const initializer", init);
    if ((bits == 32) != (g.type == ValType::i32))
        err(Kind::SyntaxError, "global initializer type mismatch", init);
    if (!looks_numeric(m_tok))
        err(Kind::SyntaxError, "expected integer constant", m_tok);
    g.init_bits = parse_int(take(), bits);
    expect_rparen();
    expect_rparen();
    m_globals.emplace_back(std::move(name), g);
}

void TextParser::parse_memory()
{
    const Token at = m_tok;
    if (m_memory)
        err(Kind::SyntaxError, "duplicate memory", at);
    if (!looks_numeric(m_tok))
        err(Kind::SyntaxError, "expected memory size in pages", m_tok);
    MemorySpec mem;
    mem.initial_pages = parse_index(take());
    if (looks_numeric(m_tok))
        mem.max_pages = parse_index(take());
    expect_rparen();
    m_memory = mem;
}

void TextParser::parse_table()
{
    const Token at = m_tok;
    if (m_table)
        err(Kind::SyntaxError, "duplicate table", at);
    expect_lparen();
    const Token kw = expect_word();
    if (kw.text != "elem")
        err(Kind::UnsupportedConstruct, "table must be declared via (elem ...)", kw);
    std::vector<Ref> refs;
    while (m_tok.type != Token::Type::rparen)
        refs.push_back(parse_ref());
    expect_rparen();
    expect_rparen();
    m_table = std::move(refs);
}

void TextParser::parse_start()
{
    if (m_start)
        err(Kind::SyntaxError, "duplicate start", m_tok);
    m_start = parse_ref();
    expect_rparen();
}

void TextParser::parse_export()
{
    PendingExport e;
    e.export_name = expect_str().text;
    expect_lparen();
    const Token desc = expect_word();
    if (desc.text != "func")
        err(Kind::UnsupportedConstruct, "only function exports are supported", desc);
    e.func = parse_ref();
    expect_rparen();
    expect_rparen();
    m_exports.push_back(std::move(e));
}

AssembledModule TextParser::run()
{
    parse_module();

    Module m;
    const auto intern = [&m](const FunctionType& ft) -> uint32_t {
        for (uint32_t i = 0; i < m.types.size(); ++i)
            if (m.types[i] == ft)
                return i;
        m.types.push_back(ft);
        return static_cast<uint32_t>(m.types.size()) - 1;
    };

    std::map<std::string, uint32_t> func_names;
    for (uint32_t i = 0; i < m_imports.size(); ++i)
    {
        const auto& imp = m_imports[i];
        if (!imp.name.empty() && !func_names.emplace(imp.name, i).second)
            err(Kind::SyntaxError, "duplicate function name $" + imp.name, imp.at);
        m.imports.push_back({imp.module_name, imp.field_name, intern(imp.type)});
    }
    const auto n_imports = static_cast<uint32_t>(m_imports.size());
    for (uint32_t i = 0; i < m_funcs.size(); ++i)
    {
        const auto& f = m_funcs[i];
        if (!f.name.empty())
        {
            Token at;
            at.line = f.line;
            at.col = f.col;
            if (!func_names.emplace(f.name, n_imports + i).second)
                err(Kind::SyntaxError, "duplicate function name $" + f.name, at);
        }
    }

    std::map<std::string, uint32_t> global_names;
    for (uint32_t i = 0; i < m_globals.size(); ++i)
    {
        const auto& [name, spec] = m_globals[i];
        if (!name.empty() && !global_names.emplace(name, i).second)
            throw AsmError{Kind::SyntaxError, "duplicate global name $" + name, 1, 1};
        m.globals.push_back(spec);
    }

    const auto resolve = [](const std::map<std::string, uint32_t>& names, const Ref& ref,
                             const char* what) -> uint32_t {
        if (!ref.is_name())
            return ref.index;
        const auto it = names.find(ref.name);
        if (it == names.end())
            throw AsmError{Kind::SyntaxError,
                std::string{"undefined "} + what + " $" + ref.name, ref.line, ref.col};
        return it->second;
    };

    if (m_memory)
        m.memories.push_back(*m_memory);
    if (m_table)
    {
        m.has_table = true;
        for (const Ref& ref : *m_table)
            m.table.push_back(resolve(func_names, ref, "function"));
    }
    if (m_start)
        m.start = resolve(func_names, *m_start, "function");

    std::vector<std::vector<std::pair<uint32_t, uint32_t>>> positions;
    for (auto& pf : m_funcs)
    {
        Function f;
        f.type_index = intern(pf.type);
        f.locals = pf.locals;
        std::vector<std::pair<uint32_t, uint32_t>> pos;
        for (auto& pin : pf.instrs)
        {
            Instruction ins;
            ins.op = pin.op;
            ins.imm0 = pin.imm0;
            ins.imm1 = pin.imm1;
            ins.table = std::move(pin.table);
            const ImmKind imm = opcode_info(pin.op).imm;
            if (imm == ImmKind::func_idx)
                ins.imm0 = resolve(func_names, pin.ref, "function");
            else if (imm == ImmKind::global_idx)
                ins.imm0 = resolve(global_names, pin.ref, "global");
            else if (imm == ImmKind::call_indirect)
                ins.imm0 = intern(pin.ci_type);
            f.body.push_back(std::move(ins));
            pos.emplace_back(pin.line, pin.col);
        }
        m.functions.push_back(std::move(f));
        positions.push_back(std::move(pos));
    }

    for (const auto& pf : m_funcs)
    {
        const uint32_t index =
            n_imports + static_cast<uint32_t>(&pf - m_funcs.data());
        for (const auto& name : pf.export_names)
            m.exports.push_back({name, index});
    }
    for (const auto& e : m_exports)
        m.exports.push_back({e.export_name, resolve(func_names, e.func, "function")});

    try
    {
        validate_module(m);
    }
    catch (const ParseError& e)
    {
        throw AsmError{Kind::SyntaxError, std::string{"invalid module: "} + e.what(), 1, 1};
    }

    std::vector<std::vector<uint32_t>> offsets;
    Bytes bytes = encode_module(m, &offsets);

    std::vector<SourceMap::Entry> entries;
    for (size_t fi = 0; fi < positions.size(); ++fi)
        for (size_t k = 0; k < positions[fi].size(); ++k)
            entries.push_back({offsets[fi][k], positions[fi][k].first, positions[fi][k].second});

    return AssembledModule{std::move(bytes), SourceMap{std::move(entries)}};
}

}  // namespace

AssembledModule assemble_text(std::string_view source)
{
    return TextParser{source}.run();
}

}  // namespace tcpa::wasm
