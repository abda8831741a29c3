#include "omx/xml.hpp"

#include <cctype>

namespace omx::xml {

const std::string* Element::attr(const std::string& key) const {
    for (const auto& [k, v] : attributes)
        if (k == key) return &v;
    return nullptr;
}

const Element* Element::child(const std::string& qname) const {
    for (const auto& c : children)
        if (c.name == qname) return &c;
    return nullptr;
}

std::vector<const Element*> Element::children_named(const std::string& qname) const {
    std::vector<const Element*> out;
    for (const auto& c : children)
        if (c.name == qname) out.push_back(&c);
    return out;
}

std::string Element::prefix() const {
    auto pos = name.find(':');
    return pos == std::string::npos ? std::string{} : name.substr(0, pos);
}

std::string Element::local() const {
    auto pos = name.find(':');
    return pos == std::string::npos ? name : name.substr(pos + 1);
}

namespace {

class Parser {
  public:
    explicit Parser(const std::string& text) : s_(text) {}

    Element run() {
        skip_prolog();
        Element root = element();
        skip_misc();
        if (pos_ < s_.size()) fail("trailing content after root element");
        return root;
    }

  private:
    const std::string& s_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, line_, col_);
    }

    bool eof() const { return pos_ >= s_.size(); }
    char peek() const { return s_[pos_]; }

    char advance() {
        char c = s_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    bool starts_with(const char* lit) const {
        return s_.compare(pos_, std::char_traits<char>::length(lit), lit) == 0;
    }

    void expect(char c) {
        if (eof() || peek() != c) fail(std::string("expected '") + c + "'");
        advance();
    }

    void skip_ws() {
        while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) advance();
    }

    void skip_until(const char* terminator) {
        auto len = std::char_traits<char>::length(terminator);
        while (!eof() && !starts_with(terminator)) advance();
        if (eof()) fail(std::string("unterminated construct, missing ") + terminator);
        for (std::size_t i = 0; i < len; ++i) advance();
    }

    void skip_misc() {
        for (;;) {
            skip_ws();
            if (starts_with("<!--")) {
                skip_until("-->");
            } else if (starts_with("<?")) {
                skip_until("?>");
            } else {
                return;
            }
        }
    }

    void skip_prolog() {
        for (;;) {
            skip_ws();
            if (starts_with("<?")) {
                skip_until("?>");
            } else if (starts_with("<!--")) {
                skip_until("-->");
            } else if (starts_with("<!DOCTYPE")) {
                skip_until(">");
            } else {
                return;
            }
        }
    }

    static bool name_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == ':' || c == '_' ||
               c == '-' || c == '.';
    }

    std::string name() {
        std::string out;
        while (!eof() && name_char(peek())) out.push_back(advance());
        if (out.empty()) fail("expected a name");
        return out;
    }

    std::string decode_entities(const std::string& raw) {
        std::string out;
        for (std::size_t i = 0; i < raw.size();) {
            if (raw[i] != '&') {
                out.push_back(raw[i++]);
                continue;
            }
            auto semi = raw.find(';', i);
            if (semi == std::string::npos) fail("unterminated entity reference");
            std::string ent = raw.substr(i + 1, semi - i - 1);
            if (ent == "amp") out.push_back('&');
            else if (ent == "lt") out.push_back('<');
            else if (ent == "gt") out.push_back('>');
            else if (ent == "quot") out.push_back('"');
            else if (ent == "apos") out.push_back('\'');
            else if (!ent.empty() && ent[0] == '#') {
                long code = (ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X'))
                                ? std::strtol(ent.c_str() + 2, nullptr, 16)
                                : std::strtol(ent.c_str() + 1, nullptr, 10);
                append_utf8(out, code);
            } else {
                fail("unknown entity &" + ent + ";");
            }
            i = semi + 1;
        }
        return out;
    }

    static void append_utf8(std::string& out, long cp) {
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
    }

    std::string attr_value() {
        if (eof() || (peek() != '"' && peek() != '\'')) fail("expected quoted attribute value");
        char quote = advance();
        std::string raw;
        while (!eof() && peek() != quote) {
            if (peek() == '<') fail("'<' in attribute value");
            raw.push_back(advance());
        }
        expect(quote);
        return decode_entities(raw);
    }

    Element element() {
        expect('<');
        Element el;
        el.name = name();
        for (;;) {
            skip_ws();
            if (eof()) fail("unterminated start tag");
            if (peek() == '/') {
                advance();
                expect('>');
                return el;
            }
            if (peek() == '>') {
                advance();
                break;
            }
            std::string key = name();
            skip_ws();
            expect('=');
            skip_ws();
            el.attributes.emplace_back(std::move(key), attr_value());
        }
        content(el);
        return el;
    }

    void content(Element& el) {
        std::string raw_text;
        for (;;) {
            if (eof()) fail("unterminated element <" + el.name + ">");
            if (starts_with("<!--")) {
                skip_until("-->");
            } else if (starts_with("<![CDATA[")) {
                for (int i = 0; i < 9; ++i) advance();
                while (!eof() && !starts_with("]]>")) raw_text.push_back(advance());
                skip_until("]]>");
            } else if (starts_with("</")) {
                advance();
                advance();
                std::string close = name();
                if (close != el.name)
                    fail("mismatched closing tag </" + close + "> for <" + el.name + ">");
                skip_ws();
                expect('>');
                el.text = decode_entities(raw_text);
                return;
            } else if (peek() == '<') {
                el.children.push_back(element());
            } else {
                raw_text.push_back(advance());
            }
        }
    }
};

}  // namespace

Element parse(const std::string& text) { return Parser(text).run(); }

std::string escape_text(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string escape_attr(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

}  // namespace omx::xml
