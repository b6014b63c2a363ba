"""Minimal DOM built on the stdlib HTML parser.

Lenient by design: unmatched end tags are dropped, unclosed elements are
closed when an ancestor closes, and decoding falls back to UTF-8 with
replacement characters.  Enough structure for annotation-block discovery,
microdata walking and visible-text extraction; not a rendering engine.
"""

from __future__ import annotations

from html.parser import HTMLParser
from urllib.parse import urljoin

VOID_ELEMENTS = frozenset({
    "area", "base", "br", "col", "embed", "hr", "img", "input",
    "link", "meta", "param", "source", "track", "wbr",
})

# elements whose raw content never counts as page text
NON_CONTENT_ELEMENTS = frozenset({"script", "style", "template"})


class Element:
    __slots__ = ("tag", "attrs", "children", "parent")

    def __init__(self, tag: str, attrs: dict[str, str] | None = None,
                 parent: "Element | None" = None):
        self.tag = tag
        self.attrs = attrs or {}
        self.children: list[Element | str] = []
        self.parent = parent

    def __repr__(self) -> str:
        return f"<Element {self.tag} attrs={self.attrs}>"

    def iter_elements(self):
        """All descendant elements in document order, self excluded."""
        for child in self.children:
            if isinstance(child, Element):
                yield child
                yield from child.iter_elements()

    def text_content(self, skip: frozenset[str] = NON_CONTENT_ELEMENTS) -> str:
        parts: list[str] = []
        self._collect_text(parts, skip)
        return "".join(parts)

    def _collect_text(self, parts: list[str], skip: frozenset[str]) -> None:
        if self.tag in skip:
            return
        for child in self.children:
            if isinstance(child, str):
                parts.append(child)
            else:
                child._collect_text(parts, skip)


class _TreeBuilder(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.root = Element("#document")
        self.stack = [self.root]

    def handle_starttag(self, tag, attrs):
        attr_map: dict[str, str] = {}
        for key, value in attrs:
            # a bare attribute (itemscope) carries an empty string value
            attr_map.setdefault(key, value if value is not None else "")
        element = Element(tag, attr_map, parent=self.stack[-1])
        self.stack[-1].children.append(element)
        if tag not in VOID_ELEMENTS:
            self.stack.append(element)

    def handle_startendtag(self, tag, attrs):
        attr_map = {k: (v if v is not None else "") for k, v in attrs}
        self.stack[-1].children.append(
            Element(tag, attr_map, parent=self.stack[-1]))

    def handle_endtag(self, tag):
        for i in range(len(self.stack) - 1, 0, -1):
            if self.stack[i].tag == tag:
                del self.stack[i:]
                return
        # no matching open element: ignore

    def handle_data(self, data):
        if data:
            self.stack[-1].children.append(data)


def parse_html(data: bytes | str) -> Element:
    if isinstance(data, (bytes, bytearray)):
        data = bytes(data).decode("utf-8", errors="replace")
    builder = _TreeBuilder()
    builder.feed(data)
    builder.close()
    return builder.root


def effective_base_url(root: Element, fallback: str) -> str:
    """The document base: the first <base href>, resolved against fallback."""
    for element in root.iter_elements():
        if element.tag == "base" and element.attrs.get("href"):
            return urljoin(fallback, element.attrs["href"])
    return fallback
