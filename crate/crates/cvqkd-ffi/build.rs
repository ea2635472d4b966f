// The C header include/cvqkd.h is maintained by hand in cbindgen layout;
// regenerate with `cbindgen --crate cvqkd-ffi --output include/cvqkd.h`
// when the tool is available, and keep it in sync with src/lib.rs.

fn main() {
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=include/cvqkd.h");
}
