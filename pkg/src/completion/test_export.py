"""Tests for deterministic output formatting and plotting."""

import json

import pytest
from django.test import override_settings

from completion.services import export
from completion.services.channels import GICChannel
from completion.services.core import LoadSpec
from completion.services.regions import ctr_boundary, strong_ctr


class TestFormatting:
    """Number rounding and JSON layout."""

    def test_significant_digits(self):
        """Twelve significant digits by default."""
        assert export.format_number(1.0 / 3.0) == 0.333333333333
        assert export.format_number(123456.7891234567) == 123456.789123
        assert export.format_number(2.0, digits=3) == 2.0

    def test_non_finite_and_negative_zero(self):
        """inf becomes null and -0.0 becomes 0.0."""
        assert export.format_number(float("inf")) is None
        assert str(export.format_number(-0.0)) == "0.0"

    @override_settings(CTR_OUTPUT_DIGITS=4)
    def test_digits_from_settings(self):
        """CTR_OUTPUT_DIGITS controls the rounding."""
        assert export.format_number(3.14159265) == 3.142

    def test_dumps_keeps_field_order(self):
        """Mappings keep insertion order and tuples become lists."""
        text = export.dumps({"b": (1.0, 2.0), "a": {"z": True, "y": None}})
        assert text.endswith("\n")
        assert list(json.loads(text)) == ["b", "a"]
        assert json.loads(text)["b"] == [1.0, 2.0]

    def test_dumps_uses_as_dict(self):
        """Objects with as_dict serialize through it."""
        payload = json.loads(export.dumps({"channel": GICChannel(1, 1, 3, 3)}))
        assert payload["channel"] == {"type": "gic", "a": 1.0, "b": 1.0, "P1": 3.0, "P2": 3.0}
        with pytest.raises(TypeError):
            export.normalize(object())


class TestFiles:
    """Atomic writes, CSV and SVG output."""

    def test_write_atomic_replaces(self, tmp_path):
        """A second write replaces the first and leaves no temporary files."""
        target = tmp_path / "nested" / "out.json"
        export.write_json(target, {"x": 1.0})
        export.write_json(target, {"x": 2.0})
        assert json.loads(target.read_text(encoding="utf-8")) == {"x": 2.0}
        assert [path.name for path in target.parent.iterdir()] == ["out.json"]

    def test_boundary_csv(self):
        """Header d1,d2 and one row per point."""
        ctr = strong_ctr(GICChannel(1, 1, 3, 3), LoadSpec(1, 1))
        text = export.boundary_csv(ctr_boundary(ctr, 10))
        lines = text.splitlines()
        assert lines[0] == "d1,d2"
        assert len(lines) == 11
        assert lines[1] == "1.0,1.59632253897"
        assert "\r" not in text

    def test_plot_svg(self, tmp_path):
        """The plot is a standalone SVG file."""
        ctr = strong_ctr(GICChannel(1, 1, 3, 3), LoadSpec(1, 1))
        path = export.plot_ctr_svg(ctr, tmp_path / "ctr.svg", samples=20)
        content = path.read_text(encoding="utf-8")
        assert "<svg" in content

    def test_plot_draws_polylines_and_rays_only(self, tmp_path):
        """Each side gets a boundary and two rays; no markers and no legend."""
        ctr = strong_ctr(GICChannel(1, 1, 3, 3), LoadSpec(1, 1))
        content = export.plot_ctr_svg(ctr, tmp_path / "ctr.svg", samples=20).read_text(
            encoding="utf-8"
        )
        for gid in ("sub1-boundary", "sub2-boundary", "sub1-ray-0", "sub1-ray-1",
                    "sub2-ray-0", "sub2-ray-1"):
            assert f'id="{gid}"' in content
        assert "ctr-vertices" not in content
        assert "legend" not in content

    def test_plot_vertices_on_request(self, tmp_path):
        """show_vertices adds the corner markers."""
        ctr = strong_ctr(GICChannel(1, 1, 3, 3), LoadSpec(1, 1))
        path = export.plot_ctr_svg(ctr, tmp_path / "ctr.svg", samples=20, show_vertices=True)
        assert 'id="ctr-vertices"' in path.read_text(encoding="utf-8")
