"""Markdown subset parser and HTML emitter for natural-text section bodies.

The dialect covers paragraphs, headings, bulleted/numbered lists, fenced
code blocks and blockquotes, with emphasis, strong, links, inline code and
citations inline. Citation syntax follows the R Markdown notation:
``[@key]``, ``[@k1; @k2]`` and bare ``@key``, where keys name paper
resources of the graph. Parsing is total: anything unrecognized degrades
to plain text, raw HTML tags are stripped, and a level-1 heading is
demoted to level 2 because the article title owns the only H1.
"""

from __future__ import annotations

import html
import math
import re
from dataclasses import dataclass, field
from typing import Callable, Union

# --- AST ----------------------------------------------------------------


@dataclass(frozen=True)
class Text:
    text: str


@dataclass(frozen=True)
class Emphasis:
    children: tuple["Inline", ...]


@dataclass(frozen=True)
class Strong:
    children: tuple["Inline", ...]


@dataclass(frozen=True)
class Code:
    text: str


@dataclass(frozen=True)
class Link:
    children: tuple["Inline", ...]
    url: str


@dataclass(frozen=True)
class Citation:
    key: str
    raw: str = field(compare=False, default="")


Inline = Union[Text, Emphasis, Strong, Code, Link, Citation]


@dataclass(frozen=True)
class Paragraph:
    children: tuple[Inline, ...]


@dataclass(frozen=True)
class Heading:
    level: int  # always within [2, 4]
    children: tuple[Inline, ...]


@dataclass(frozen=True)
class ListBlock:
    ordered: bool
    items: tuple[tuple[Inline, ...], ...]


@dataclass(frozen=True)
class CodeBlock:
    text: str
    info: str = ""


@dataclass(frozen=True)
class BlockQuote:
    children: tuple[Inline, ...]


Block = Union[Paragraph, Heading, ListBlock, CodeBlock, BlockQuote]


@dataclass(frozen=True)
class TextAst:
    blocks: tuple[Block, ...]


# --- block parsing ---------------------------------------------------------

_HEADING_RE = re.compile(r"^(#{1,6})\s+(.*?)\s*#*\s*$")
_BULLET_RE = re.compile(r"^[-*]\s+(.*)$")
_ORDERED_RE = re.compile(r"^\d+\.\s+(.*)$")
_QUOTE_RE = re.compile(r"^>\s?(.*)$")
_FENCE_RE = re.compile(r"^```\s*(\S*)\s*$")
_TAG_RE = re.compile(r"</?[A-Za-z!][^>\n]*>")


def parse(text: str) -> TextAst:
    """Total function: any UTF-8 input yields a well-formed tree."""
    lines = text.replace("\r\n", "\n").replace("\r", "\n").split("\n")
    blocks: list[Block] = []
    i = 0
    n = len(lines)
    while i < n:
        line = lines[i]
        if not line.strip():
            i += 1
            continue
        fence = _FENCE_RE.match(line)
        if fence:
            info = fence.group(1)
            body: list[str] = []
            i += 1
            while i < n and not _FENCE_RE.match(lines[i]):
                body.append(lines[i])
                i += 1
            i += 1  # swallow closing fence (or run off the end)
            blocks.append(CodeBlock(text="\n".join(body), info=info))
            continue
        heading = _HEADING_RE.match(line)
        if heading:
            level = min(max(len(heading.group(1)), 2), 4)
            blocks.append(Heading(level=level, children=parse_inlines(heading.group(2))))
            i += 1
            continue
        if _BULLET_RE.match(line):
            items = []
            while i < n and _BULLET_RE.match(lines[i]):
                items.append(parse_inlines(_BULLET_RE.match(lines[i]).group(1)))
                i += 1
            blocks.append(ListBlock(ordered=False, items=tuple(items)))
            continue
        if _ORDERED_RE.match(line):
            items = []
            while i < n and _ORDERED_RE.match(lines[i]):
                items.append(parse_inlines(_ORDERED_RE.match(lines[i]).group(1)))
                i += 1
            blocks.append(ListBlock(ordered=True, items=tuple(items)))
            continue
        if _QUOTE_RE.match(line):
            quoted = []
            while i < n and _QUOTE_RE.match(lines[i]):
                quoted.append(_QUOTE_RE.match(lines[i]).group(1))
                i += 1
            blocks.append(BlockQuote(children=parse_inlines(" ".join(q for q in quoted if q.strip()))))
            continue
        paragraph_lines = []
        while i < n and lines[i].strip() and not _is_block_start(lines[i]):
            paragraph_lines.append(lines[i].strip())
            i += 1
        if paragraph_lines:
            blocks.append(Paragraph(children=parse_inlines(" ".join(paragraph_lines))))
        else:  # line was a block start; consume it as its own paragraph
            blocks.append(Paragraph(children=parse_inlines(lines[i].strip())))
            i += 1
    return TextAst(blocks=tuple(blocks))


def _is_block_start(line: str) -> bool:
    return bool(
        _HEADING_RE.match(line)
        or _BULLET_RE.match(line)
        or _ORDERED_RE.match(line)
        or _QUOTE_RE.match(line)
        or _FENCE_RE.match(line)
    )


# --- inline parsing -----------------------------------------------------------

_ESCAPABLE = set("\\`*_{}[]()#+-.!>@|")
_CODE_RE = re.compile(r"`([^`\n]+)`")
_CITE_GROUP_RE = re.compile(r"\[@([A-Za-z0-9_-]+)((?:\s*;\s*@[A-Za-z0-9_-]+)*)\]")
_CITE_BARE_RE = re.compile(r"@([A-Za-z0-9_-]+)")
_LINK_RE = re.compile(r"\[([^\]\n]*)\]\(([^)\s]*)\)")
_STRONG_RE = re.compile(r"\*\*(.+?)\*\*")
_EM_STAR_RE = re.compile(r"\*([^*\n]+)\*")
_EM_UNDER_RE = re.compile(r"_([^_\n]+)_")


def parse_inlines(text: str) -> tuple[Inline, ...]:
    text = _TAG_RE.sub("", text)
    out: list[Inline] = []
    plain: list[str] = []

    def flush():
        if plain:
            out.append(Text("".join(plain)))
            plain.clear()

    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\\" and i + 1 < n and text[i + 1] in _ESCAPABLE:
            plain.append(text[i + 1])
            i += 2
            continue
        m = _CODE_RE.match(text, i)
        if m:
            flush()
            out.append(Code(m.group(1)))
            i = m.end()
            continue
        m = _CITE_GROUP_RE.match(text, i)
        if m:
            flush()
            keys = [m.group(1)] + re.findall(r"@([A-Za-z0-9_-]+)", m.group(2))
            for key in keys:
                out.append(Citation(key=key, raw=m.group(0)))
            i = m.end()
            continue
        m = _LINK_RE.match(text, i)
        if m:
            flush()
            out.append(Link(children=parse_inlines(m.group(1)), url=m.group(2)))
            i = m.end()
            continue
        m = _STRONG_RE.match(text, i)
        if m:
            flush()
            out.append(Strong(children=parse_inlines(m.group(1))))
            i = m.end()
            continue
        m = _EM_STAR_RE.match(text, i) or _EM_UNDER_RE.match(text, i)
        if m:
            flush()
            out.append(Emphasis(children=parse_inlines(m.group(1))))
            i = m.end()
            continue
        if c == "@" and (i == 0 or not (text[i - 1].isalnum() or text[i - 1] in "_@")):
            m = _CITE_BARE_RE.match(text, i)
            if m:
                flush()
                out.append(Citation(key=m.group(1), raw=m.group(0)))
                i = m.end()
                continue
        plain.append(c)
        i += 1
    flush()
    return tuple(out)


# --- citation extraction -------------------------------------------------------


def extract_citations(ast: TextAst) -> list[str]:
    """Citation keys in first-appearance order, duplicates removed."""
    seen: set[str] = set()
    ordered: list[str] = []

    def walk(nodes):
        for node in nodes:
            if isinstance(node, Citation):
                if node.key not in seen:
                    seen.add(node.key)
                    ordered.append(node.key)
            elif isinstance(node, (Emphasis, Strong, Link)):
                walk(node.children)

    for block in ast.blocks:
        if isinstance(block, (Paragraph, Heading, BlockQuote)):
            walk(block.children)
        elif isinstance(block, ListBlock):
            for item in block.items:
                walk(item)
    return ordered


# --- HTML emission ---------------------------------------------------------------

Resolver = Callable[[str], "tuple[int, object] | None"]


def emit_html(ast: TextAst, resolver: Resolver, heading_offset: int = 0) -> str:
    """Render to an HTML fragment of semantic tags only.

    ``resolver`` maps a citation key to (number, metadata) or None;
    unresolved citations keep their literal source text and carry a
    ``data-unresolved`` marker.
    """
    parts: list[str] = []
    for block in ast.blocks:
        if isinstance(block, Paragraph):
            parts.append(f"<p>{_inlines_html(block.children, resolver)}</p>")
        elif isinstance(block, Heading):
            level = block.level + heading_offset
            parts.append(f"<h{level}>{_inlines_html(block.children, resolver)}</h{level}>")
        elif isinstance(block, ListBlock):
            tag = "ol" if block.ordered else "ul"
            items = "".join(f"<li>{_inlines_html(item, resolver)}</li>" for item in block.items)
            parts.append(f"<{tag}>{items}</{tag}>")
        elif isinstance(block, CodeBlock):
            parts.append(f"<pre><code>{html.escape(block.text)}</code></pre>")
        elif isinstance(block, BlockQuote):
            parts.append(f"<blockquote><p>{_inlines_html(block.children, resolver)}</p></blockquote>")
    return "\n".join(parts)


def _inlines_html(nodes, resolver: Resolver) -> str:
    out = []
    for node in nodes:
        if isinstance(node, Text):
            out.append(html.escape(node.text))
        elif isinstance(node, Emphasis):
            out.append(f"<em>{_inlines_html(node.children, resolver)}</em>")
        elif isinstance(node, Strong):
            out.append(f"<strong>{_inlines_html(node.children, resolver)}</strong>")
        elif isinstance(node, Code):
            out.append(f"<code>{html.escape(node.text)}</code>")
        elif isinstance(node, Link):
            url = html.escape(node.url, quote=True)
            out.append(f'<a href="{url}">{_inlines_html(node.children, resolver)}</a>')
        elif isinstance(node, Citation):
            resolved = resolver(node.key)
            if resolved is None:
                literal = html.escape(f"[@{node.key}]")
                out.append(f'<span class="citation" data-unresolved="true">{literal}</span>')
            else:
                number = resolved[0]
                out.append(
                    f'<a class="citation" href="#ref-{html.escape(node.key, quote=True)}">[{number}]</a>'
                )
    return "".join(out)


# --- Markdown emission (normal form) ----------------------------------------------


def emit_markdown(ast: TextAst) -> str:
    """Canonical markdown for the supported subset; parse(emit_markdown(x))
    reproduces x for any parsed tree."""
    parts: list[str] = []
    for block in ast.blocks:
        if isinstance(block, Paragraph):
            parts.append(_guard_block_start(_inlines_md(block.children)))
        elif isinstance(block, Heading):
            parts.append("#" * block.level + " " + _inlines_md(block.children))
        elif isinstance(block, ListBlock):
            lines = []
            for idx, item in enumerate(block.items, start=1):
                marker = f"{idx}." if block.ordered else "-"
                lines.append(f"{marker} {_inlines_md(item)}")
            parts.append("\n".join(lines))
        elif isinstance(block, CodeBlock):
            parts.append(f"```{block.info}\n{block.text}\n```")
        elif isinstance(block, BlockQuote):
            parts.append("> " + _inlines_md(block.children))
    return "\n\n".join(parts) + ("\n" if parts else "")


def _guard_block_start(line: str) -> str:
    if _is_block_start(line):
        return "\\" + line
    return line


def _inlines_md(nodes) -> str:
    out = []
    for node in nodes:
        if isinstance(node, Text):
            out.append(_escape_md(node.text))
        elif isinstance(node, Emphasis):
            out.append(f"*{_inlines_md(node.children)}*")
        elif isinstance(node, Strong):
            out.append(f"**{_inlines_md(node.children)}**")
        elif isinstance(node, Code):
            out.append(f"`{node.text}`")
        elif isinstance(node, Link):
            out.append(f"[{_inlines_md(node.children)}]({node.url})")
        elif isinstance(node, Citation):
            out.append(f"[@{node.key}]")
    return "".join(out)


def _escape_md(text: str) -> str:
    return re.sub(r"([\\`*_\[\]@])", r"\\\1", text)


# --- word counting (reading time support) --------------------------------------------


def count_words(ast: TextAst) -> int:
    """Words of prose content; citation markers do not count."""
    chunks: list[str] = []

    def walk(nodes):
        for node in nodes:
            if isinstance(node, Text):
                chunks.append(node.text)
            elif isinstance(node, Code):
                chunks.append(node.text)
            elif isinstance(node, (Emphasis, Strong, Link)):
                walk(node.children)

    for block in ast.blocks:
        if isinstance(block, (Paragraph, Heading, BlockQuote)):
            walk(block.children)
        elif isinstance(block, ListBlock):
            for item in block.items:
                walk(item)
        elif isinstance(block, CodeBlock):
            chunks.append(block.text)
    return sum(len(chunk.split()) for chunk in chunks)


def reading_minutes(total_words: int, words_per_minute: int = 250) -> int:
    if total_words <= 0:
        return 0
    return max(1, math.ceil(total_words / words_per_minute))
