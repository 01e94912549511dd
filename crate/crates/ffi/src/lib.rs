//! C ABI surface for the metallic-wang library (placeholder).
