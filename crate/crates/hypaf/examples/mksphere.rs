fn main() {
    let s = hypaf::hypersurface::AxisymmetricHypersurface::sphere(6, 1.0, 64).unwrap();
    hypaf::hypersurface::write_surface(&s, "/tmp/sphere.surface").unwrap();
    let p = hypaf::hypersurface::AxisymmetricHypersurface::cos_perturbed(6, 2.0, 0.1, 2, 128).unwrap();
    hypaf::hypersurface::write_surface(&p, "/tmp/perturbed.surface").unwrap();
}
