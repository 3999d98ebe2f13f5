//! Two-layer lossless HDR image coding.
//!
//! An HDR image is tone mapped to an LDR image that is stored as an ordinary
//! baseline JPEG (the base layer). The decoder predicts the HDR image from the
//! decoded base layer; the difference to the original is carried losslessly in
//! a residual layer. In `HP` mode the residual components are histogram packed
//! before entropy coding; `XT` mode codes them directly and may carry extra
//! base-layer precision in a refinement plane.
//!
//! ```no_run
//! use hdr2l_core::container::{self, CodecParams, Mode};
//! use hdr2l_core::tmo::TmoKind;
//!
//! let bytes = std::fs::read("memorial.hdr").unwrap();
//! let hdr = hdr2l_core::imagio::parse_rgbe(&bytes).unwrap();
//! let params = CodecParams::new(Mode::Hp, TmoKind::Drago, 90, 0).unwrap();
//! let stream = container::encode(&hdr, &params).unwrap();
//! assert_eq!(container::decode(&stream).unwrap(), hdr);
//! ```

#![allow(clippy::needless_range_loop)]

pub mod basejpeg;
pub mod bench;
pub mod bitio;
pub mod container;
pub mod error;
pub mod hpack;
pub mod imagio;
pub mod rescodec;
pub mod rice;
pub mod tmo;
pub mod tmqi;

pub use error::{Error, Result};
