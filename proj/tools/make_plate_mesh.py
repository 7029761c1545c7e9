#!/usr/bin/env python3
"""Generate the coarse perforated-plate mesh asset (data/plate_with_hole.msh).

Plate 4 x 2 with a centred hole of radius 0.8. Characteristic length 0.5 on
the left and right edges, 0.2 below the hole and 0.05 above it. Written as
MSH 2.2 ASCII with physical groups left/right/top/bottom/hole/plate.

Requires the gmsh Python module. The committed asset is what the build uses;
this script is only needed to regenerate it.
"""
import sys

import gmsh

L, H, R = 4.0, 2.0, 0.8
XC, YC = 2.0, 1.0
H_EDGE, H_BELOW, H_ABOVE = 0.5, 0.2, 0.05


def main(out_path):
    gmsh.initialize()
    gmsh.option.setNumber("General.Terminal", 0)
    gmsh.model.add("plate_with_hole")
    geo = gmsh.model.geo

    p_bl = geo.addPoint(0.0, 0.0, 0.0, H_EDGE)
    p_bm = geo.addPoint(XC, 0.0, 0.0, H_BELOW)
    p_br = geo.addPoint(L, 0.0, 0.0, H_EDGE)
    p_tr = geo.addPoint(L, H, 0.0, H_EDGE)
    p_tm = geo.addPoint(XC, H, 0.0, H_ABOVE)
    p_tl = geo.addPoint(0.0, H, 0.0, H_EDGE)

    c = geo.addPoint(XC, YC, 0.0)
    h_right = geo.addPoint(XC + R, YC, 0.0, H_BELOW)
    h_top = geo.addPoint(XC, YC + R, 0.0, H_ABOVE)
    h_left = geo.addPoint(XC - R, YC, 0.0, H_BELOW)
    h_bottom = geo.addPoint(XC, YC - R, 0.0, H_BELOW)

    bottom = [geo.addLine(p_bl, p_bm), geo.addLine(p_bm, p_br)]
    right = [geo.addLine(p_br, p_tr)]
    top = [geo.addLine(p_tr, p_tm), geo.addLine(p_tm, p_tl)]
    left = [geo.addLine(p_tl, p_bl)]
    # clockwise around the hole so the surface keeps a counterclockwise outer loop
    hole = [
        geo.addCircleArc(h_right, c, h_bottom),
        geo.addCircleArc(h_bottom, c, h_left),
        geo.addCircleArc(h_left, c, h_top),
        geo.addCircleArc(h_top, c, h_right),
    ]
    outer = geo.addCurveLoop(bottom + right + top + left)
    inner = geo.addCurveLoop(hole)
    surf = geo.addPlaneSurface([outer, inner])
    geo.synchronize()

    for name, curves in (("left", left), ("right", right), ("top", top),
                         ("bottom", bottom), ("hole", hole)):
        tag = gmsh.model.addPhysicalGroup(1, curves)
        gmsh.model.setPhysicalName(1, tag, name)
    tag = gmsh.model.addPhysicalGroup(2, [surf])
    gmsh.model.setPhysicalName(2, tag, "plate")

    gmsh.option.setNumber("Mesh.Algorithm", 6)
    gmsh.option.setNumber("Mesh.MeshSizeExtendFromBoundary", 1)
    gmsh.option.setNumber("Mesh.MeshSizeFromPoints", 1)
    gmsh.model.mesh.generate(2)
    gmsh.option.setNumber("Mesh.MshFileVersion", 2.2)
    gmsh.option.setNumber("Mesh.Binary", 0)
    gmsh.option.setNumber("Mesh.SaveAll", 0)
    gmsh.write(out_path)
    gmsh.finalize()


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/plate_with_hole.msh")
