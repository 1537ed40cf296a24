import logging
from pathlib import Path

import pandas as pd
from PIL import Image, ImageDraw
from werkzeug.utils import secure_filename

from errors import InputValidationError
from models.clustering import NOISE
from models.report import RunReport
from services.svg_canvas import SvgCanvas

logger = logging.getLogger(__name__)

FORMATS = ('json', 'csv', 'svg', 'png')


class _Scale:
    """Linear map from a data interval onto a pixel interval"""

    def __init__(self, low, high, start, end):
        if high == low:
            low, high = low - 0.5, high + 0.5
        self.low, self.high = low, high
        self.start, self.end = start, end

    def __call__(self, value):
        return self.start + (value - self.low) / (self.high - self.low) * (self.end - self.start)


def _blend(low, high, t):
    return tuple(int(round(a + (b - a) * t)) for a, b in zip(low, high))


def _hex(rgb):
    return '#%02x%02x%02x' % rgb


class ReportWriter:
    """Renders a RunReport as JSON, CSV tables, SVG plots or a PNG heat map"""

    def __init__(self, config):
        self.config = config
        self.svg_config = config.SVG_CONFIG
        self.png_config = config.PNG_CONFIG

    def emit_report(self, report, fmt, out_dir):
        """
        Write the report in one format.

        Args:
            report: RunReport (or its dict form)
            fmt: one of json, csv, svg, png
            out_dir: directory to write into; created when missing

        Returns:
            List of written file paths, in write order
        """
        if fmt not in FORMATS:
            raise InputValidationError(f"unknown format: {fmt} (allowed: {', '.join(FORMATS)})")
        if isinstance(report, dict):
            report = RunReport.from_dict(report)

        out_dir = Path(out_dir)
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
            writer = getattr(self, f"_emit_{fmt}")
            written = writer(report, out_dir)
        except OSError as e:
            raise InputValidationError(f"cannot write report to {out_dir}: {e.strerror or e}") from None

        logger.info(f"Wrote {len(written)} {fmt} file(s) to {out_dir}")
        return written

    def _path(self, out_dir, name):
        return out_dir / secure_filename(name)

    def _write_text(self, path, text):
        with open(path, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)
        return path

    def _write_table(self, frame, path):
        frame.to_csv(path, index=False, lineterminator='\n', encoding='utf-8')
        return path

    # JSON

    def _emit_json(self, report, out_dir):
        return [self._write_text(self._path(out_dir, 'run.json'), report.to_json())]

    # CSV

    def _emit_csv(self, report, out_dir):
        written = []

        if report.summary:
            written.append(self._write_table(pd.DataFrame(report.summary), self._path(out_dir, 'summary.csv')))

        if report.correlations:
            rows = []
            for corr in report.correlations:
                rows.append({
                    'variable': corr['variable'],
                    'pearson': corr['pearson'],
                    'pearson_strength': corr['strength']['pearson'],
                    'spearman': corr['spearman'],
                    'spearman_strength': corr['strength']['spearman'],
                    'kendall': corr['kendall'],
                    'kendall_strength': corr['strength']['kendall'],
                })
            written.append(self._write_table(pd.DataFrame(rows), self._path(out_dir, 'correlations.csv')))

        if report.regressions:
            rows = [{'variable': reg['variable'], 'target': reg['target'], **reg['linear']}
                    for reg in report.regressions]
            written.append(self._write_table(pd.DataFrame(rows), self._path(out_dir, 'regressions.csv')))

        validation = report.validation or {}
        if validation.get('k_values'):
            written.append(self._write_table(self._validation_frame(validation),
                                             self._path(out_dir, 'validation.csv')))

        clustering = report.clustering or {}
        if clustering.get('assignment'):
            frame = pd.DataFrame({
                'row_id': clustering['row_ids'],
                'label': clustering['assignment']['labels'],
            })
            written.append(self._write_table(frame, self._path(out_dir, 'assignments.csv')))

        return written

    def _validation_frame(self, validation):
        k_values = validation['k_values']
        gap = validation.get('gap') or {}
        gap_by_k = dict(zip(gap.get('k_values', []), zip(gap.get('gap', []), gap.get('s', []))))
        ssw = validation.get('ssw') or {}
        ssw_by_k = dict(zip(ssw.get('k_values', []), ssw.get('ssw', [])))
        silhouette = validation.get('silhouette', {})

        rows = []
        for k in k_values:
            gap_value, s_value = gap_by_k.get(k, (None, None))
            rows.append({
                'k': k,
                'silhouette': silhouette.get(str(k)),
                'gap': gap_value,
                's': s_value,
                'ssw': ssw_by_k.get(k),
            })
        return pd.DataFrame(rows, columns=['k', 'silhouette', 'gap', 's', 'ssw'])

    # SVG

    def _canvas(self, height=None):
        cfg = self.svg_config
        return SvgCanvas(cfg['width'], height or cfg['height'], cfg['decimals'],
                         cfg['font_family'], cfg['font_size'])

    def _color(self, label):
        if label == NOISE:
            return self.svg_config['noise_color']
        palette = self.svg_config['palette']
        return palette[label % len(palette)]

    def _emit_svg(self, report, out_dir):
        written = []
        for reg in report.regressions:
            path = self._path(out_dir, f"scatter_{reg['variable']}.svg")
            written.append(self._write_text(path, self.scatter_svg(reg)))

        if report.column_distances:
            path = self._path(out_dir, 'distance_heatmap.svg')
            written.append(self._write_text(path, self.heatmap_svg(report.column_distances)))

        clustering = report.clustering or {}
        if clustering.get('dendrogram'):
            path = self._path(out_dir, 'dendrogram.svg')
            written.append(self._write_text(path, self.dendrogram_svg(clustering)))

        validation = report.validation or {}
        if validation.get('k_values'):
            path = self._path(out_dir, 'validation_curves.svg')
            written.append(self._write_text(path, self.validation_svg(validation)))

        if clustering.get('silhouette'):
            path = self._path(out_dir, 'silhouette_profile.svg')
            written.append(self._write_text(path, self.silhouette_svg(clustering)))

        return written

    def _axes(self, canvas, x_scale, y_scale, x_label, y_label):
        margin = self.svg_config['margin']
        left, right = x_scale.start, x_scale.end
        bottom, top = y_scale.start, y_scale.end
        canvas.group_start('axes')
        canvas.line(left, bottom, right, bottom)
        canvas.line(left, bottom, left, top)
        canvas.text(left, bottom + 16, f"{x_scale.low:.4g}", anchor='start')
        canvas.text(right, bottom + 16, f"{x_scale.high:.4g}", anchor='end')
        canvas.text(left - 4, bottom, f"{y_scale.low:.4g}", anchor='end')
        canvas.text(left - 4, top + 4, f"{y_scale.high:.4g}", anchor='end')
        canvas.text((left + right) / 2, bottom + 32, x_label, anchor='middle')
        canvas.text(margin / 4, (top + bottom) / 2, y_label, anchor='middle')
        canvas.group_end()

    def scatter_svg(self, regression):
        """Target against one variable with the least-squares line and the LOWESS curve"""
        cfg = self.svg_config
        margin, width, height = cfg['margin'], cfg['width'], cfg['height']
        x, y = regression['x'], regression['y']
        fitted = regression['lowess']['fitted']
        linear = regression['linear']
        line_y = [linear['intercept'] + linear['slope'] * v for v in (x[0], x[-1])]

        x_scale = _Scale(min(x), max(x), margin, width - margin)
        y_values = y + fitted + line_y
        y_scale = _Scale(min(y_values), max(y_values), height - margin, margin)

        canvas = self._canvas()
        canvas.text(width / 2, margin / 2, f"{regression['target']} vs {regression['variable']}",
                    anchor='middle')
        self._axes(canvas, x_scale, y_scale, regression['variable'], regression['target'])

        canvas.group_start('points')
        for xi, yi in zip(x, y):
            canvas.circle(x_scale(xi), y_scale(yi), cfg['point_radius'], cfg['palette'][0])
        canvas.group_end()

        canvas.line(x_scale(x[0]), y_scale(line_y[0]), x_scale(x[-1]), y_scale(line_y[1]),
                    stroke=cfg['palette'][1], class_='linear-fit')
        canvas.polyline([(x_scale(a), y_scale(b)) for a, b in zip(regression['lowess']['x'], fitted)],
                        stroke=cfg['palette'][2], class_='lowess-fit')
        return canvas.get_svg()

    def heatmap_svg(self, distances):
        """Square grid of pairwise distances, darker for larger"""
        cfg = self.svg_config
        png = self.png_config
        margin, width = cfg['margin'], cfg['width']
        names = distances['row_ids']
        values = distances['values']
        n = len(names)
        top = max(max(row) for row in values) or 1.0
        cell = (width - 2 * margin) / n
        height = int(2 * margin + n * cell)

        canvas = self._canvas(height)
        canvas.text(width / 2, margin / 2, f"{distances['metric']} distances", anchor='middle')
        canvas.group_start('cells')
        for i, row in enumerate(values):
            for j, value in enumerate(row):
                fill = _hex(_blend(png['low_color'], png['high_color'], value / top))
                canvas.rect(margin + j * cell, margin + i * cell, cell, cell, fill)
        canvas.group_end()

        canvas.group_start('labels')
        for i, name in enumerate(names):
            canvas.text(margin - 4, margin + (i + 0.5) * cell + 4, name, anchor='end', font_size=8)
            canvas.text(margin + (i + 0.5) * cell, margin - 4, name, anchor='middle', font_size=8)
        canvas.group_end()
        return canvas.get_svg()

    def dendrogram_svg(self, clustering):
        """One bracket per merge, leaves laid out in dendrogram order"""
        cfg = self.svg_config
        margin, width, height = cfg['margin'], cfg['width'], cfg['height']
        tree = clustering['dendrogram']
        merges = tree['merges']
        order = clustering['leaf_order']
        row_ids = clustering['row_ids']
        n = len(order)

        step = (width - 2 * margin) / max(n - 1, 1)
        x_of = {leaf: margin + position * step for position, leaf in enumerate(order)}
        top_height = merges[-1]['height'] if merges else 0.0
        y_scale = _Scale(0.0, top_height, height - margin, margin)
        y_of = {leaf: y_scale(0.0) for leaf in order}

        canvas = self._canvas()
        canvas.text(width / 2, margin / 2, f"{tree['linkage']} linkage, {tree['metric']}",
                    anchor='middle')

        canvas.group_start('dendrogram')
        for i, merge in enumerate(merges):
            node = n + i
            left, right = merge['left'], merge['right']
            level = y_scale(merge['height'])
            canvas.path([
                ('M', x_of[left], y_of[left]),
                ('L', x_of[left], level),
                ('L', x_of[right], level),
                ('L', x_of[right], y_of[right]),
            ], class_='merge')
            x_of[node] = (x_of[left] + x_of[right]) / 2
            y_of[node] = level
        canvas.group_end()

        canvas.group_start('leaves')
        for leaf in order:
            canvas.text(x_of[leaf], height - margin + 14, row_ids[leaf], anchor='middle', font_size=8)
        canvas.group_end()
        return canvas.get_svg()

    def validation_svg(self, validation):
        """Silhouette, GAP (with s bars) and SSW against k, one panel each"""
        cfg = self.svg_config
        margin, width, height = cfg['margin'], cfg['width'], cfg['height']
        k_values = validation['k_values']
        gap = validation.get('gap') or {}
        ssw = validation.get('ssw') or {}
        silhouette = validation.get('silhouette', {})

        panels = [
            ('silhouette', [(int(k), v) for k, v in sorted(silhouette.items(), key=lambda i: int(i[0]))], None),
            ('gap', list(zip(gap.get('k_values', []), gap.get('gap', []))), gap.get('s')),
            ('ssw', list(zip(ssw.get('k_values', []), ssw.get('ssw', []))), None),
        ]
        panel_height = (height - margin) / len(panels)
        canvas = self._canvas()
        x_scale_args = (min(k_values), max(k_values), margin, width - margin)

        for index, (name, series, spread) in enumerate(panels):
            top = margin / 2 + index * panel_height + 12
            bottom = top + panel_height - 36
            canvas.group_start(f"panel-{name}")
            canvas.text(margin, top - 4, name)
            if series:
                low = [v - (spread[i] if spread else 0.0) for i, (_, v) in enumerate(series)]
                high = [v + (spread[i] if spread else 0.0) for i, (_, v) in enumerate(series)]
                x_scale = _Scale(*x_scale_args)
                y_scale = _Scale(min(low), max(high), bottom, top)
                self._axes(canvas, x_scale, y_scale, 'k', '')
                canvas.polyline([(x_scale(k), y_scale(v)) for k, v in series], stroke=cfg['palette'][0])
                for i, (k, v) in enumerate(series):
                    canvas.circle(x_scale(k), y_scale(v), cfg['point_radius'], cfg['palette'][0])
                    if spread:
                        canvas.line(x_scale(k), y_scale(low[i]), x_scale(k), y_scale(high[i]),
                                    stroke=cfg['palette'][1])
            canvas.group_end()

        return canvas.get_svg()

    def silhouette_svg(self, clustering):
        """Per-point silhouette bars grouped by cluster, widest first"""
        cfg = self.svg_config
        margin, width, height = cfg['margin'], cfg['width'], cfg['height']
        profile = clustering['silhouette']
        labels = profile['labels']
        widths = profile['per_point']

        order = sorted(range(len(widths)), key=lambda i: (labels[i], -widths[i], i))
        bar = (height - 2 * margin) / max(len(order), 1)
        x_scale = _Scale(-1.0, 1.0, margin, width - margin)

        canvas = self._canvas()
        canvas.text(width / 2, margin / 2, f"silhouette, overall {profile['overall']:.3f}",
                    anchor='middle')
        canvas.group_start('bars')
        for position, i in enumerate(order):
            start, end = sorted((x_scale(0.0), x_scale(widths[i])))
            canvas.rect(start, margin + position * bar, end - start, bar, self._color(labels[i]))
        canvas.group_end()
        canvas.line(x_scale(0.0), margin, x_scale(0.0), height - margin)
        return canvas.get_svg()

    # PNG

    def _emit_png(self, report, out_dir):
        if not report.column_distances:
            logger.warning("Report has no column distances; no PNG written")
            return []
        return [self.heatmap_png(report.column_distances, self._path(out_dir, 'distance_heatmap.png'))]

    def heatmap_png(self, distances, path):
        """Raster version of the distance heat map, one square per entry"""
        cell = self.png_config['cell_size']
        values = distances['values']
        n = len(values)
        top = max(max(row) for row in values) or 1.0

        image = Image.new('RGB', (n * cell, n * cell), self.png_config['low_color'])
        draw = ImageDraw.Draw(image)
        for i, row in enumerate(values):
            for j, value in enumerate(row):
                fill = _blend(self.png_config['low_color'], self.png_config['high_color'], value / top)
                draw.rectangle([j * cell, i * cell, (j + 1) * cell - 1, (i + 1) * cell - 1], fill=fill)
        image.save(path, format='PNG')
        return path
