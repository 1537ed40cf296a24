from markupsafe import escape


class SvgCanvas:
    """
    Minimal SVG document builder.

    Coordinates are written with a fixed number of decimals and elements in
    call order, so the same drawing calls always yield the same bytes.
    """

    def __init__(self, width, height, decimals=2, font_family='sans-serif', font_size=12):
        self.width = width
        self.height = height
        self.decimals = decimals
        self.font_family = font_family
        self.font_size = font_size
        self.svg = ""

    def _n(self, value):
        text = f"{float(value):.{self.decimals}f}"
        # avoid "-0.00"
        return text[1:] if text.startswith('-') and float(text) == 0 else text

    def _attrs(self, attrs):
        if not attrs:
            return ''
        return ''.join(f' {key.rstrip("_").replace("_", "-")}="{escape(str(value))}"'
                       for key, value in attrs.items())

    def group_start(self, class_name=None, title=None):
        class_attr = f' class="{escape(class_name)}"' if class_name else ''
        self.svg += f'<g{class_attr}>\n'
        if title:
            self.svg += f'<title>{escape(title)}</title>\n'

    def group_end(self):
        self.svg += '</g>\n'

    def rect(self, x, y, width, height, fill, **attrs):
        self.svg += (f'<rect x="{self._n(x)}" y="{self._n(y)}" width="{self._n(width)}" '
                     f'height="{self._n(height)}" fill="{fill}"{self._attrs(attrs)}/>\n')

    def line(self, x1, y1, x2, y2, stroke='#000000', **attrs):
        self.svg += (f'<line x1="{self._n(x1)}" y1="{self._n(y1)}" x2="{self._n(x2)}" '
                     f'y2="{self._n(y2)}" stroke="{stroke}"{self._attrs(attrs)}/>\n')

    def circle(self, cx, cy, r, fill, **attrs):
        self.svg += (f'<circle cx="{self._n(cx)}" cy="{self._n(cy)}" r="{self._n(r)}" '
                     f'fill="{fill}"{self._attrs(attrs)}/>\n')

    def polyline(self, points, stroke, **attrs):
        coords = ' '.join(f"{self._n(x)},{self._n(y)}" for x, y in points)
        self.svg += (f'<polyline points="{coords}" fill="none" stroke="{stroke}"'
                     f'{self._attrs(attrs)}/>\n')

    def path(self, commands, stroke='#000000', **attrs):
        """commands is a sequence of (letter, x, y)"""
        d = ' '.join(f"{letter}{self._n(x)},{self._n(y)}" for letter, x, y in commands)
        self.svg += f'<path d="{d}" fill="none" stroke="{stroke}"{self._attrs(attrs)}/>\n'

    def text(self, x, y, string, anchor='start', **attrs):
        self.svg += (f'<text x="{self._n(x)}" y="{self._n(y)}" text-anchor="{anchor}"'
                     f'{self._attrs(attrs)}>{escape(str(string))}</text>\n')

    def get_svg(self):
        header = (f'<?xml version="1.0" encoding="UTF-8"?>\n'
                  f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
                  f'width="{self.width}" height="{self.height}" '
                  f'viewBox="0 0 {self.width} {self.height}" '
                  f'font-family="{escape(self.font_family)}" font-size="{self.font_size}">\n')
        return f"{header}{self.svg}</svg>\n"
