//! Flat binary array format (`.dmar`).
//!
//! Layout, all little-endian:
//!
//! ```text
//! magic  b"DMAR"
//! u32    version (1)
//! u32    dtype   (1 = f64, 2 = complex f64 stored as re,im pairs)
//! u32    ndim
//! u64    shape[ndim]
//! data   row-major, last index fastest
//! ```

use num_complex::Complex64;

pub const MAGIC: &[u8; 4] = b"DMAR";
pub const VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dtype {
    F64 = 1,
    C128 = 2,
}

#[derive(Debug, thiserror::Error)]
pub enum ArrayIoError {
    #[error("bad magic")]
    Magic,
    #[error("unsupported version {0}")]
    Version(u32),
    #[error("unknown dtype {0}")]
    Dtype(u32),
    #[error("truncated input")]
    Truncated,
    #[error("shape {shape:?} does not match {len} elements")]
    Shape { shape: Vec<usize>, len: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub enum ArrayData {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlatArray {
    pub shape: Vec<usize>,
    pub data: ArrayData,
}

impl FlatArray {
    pub fn real(shape: Vec<usize>, data: Vec<f64>) -> Result<Self, ArrayIoError> {
        check_shape(&shape, data.len())?;
        Ok(Self {
            shape,
            data: ArrayData::Real(data),
        })
    }

    pub fn complex(shape: Vec<usize>, data: Vec<Complex64>) -> Result<Self, ArrayIoError> {
        check_shape(&shape, data.len())?;
        Ok(Self {
            shape,
            data: ArrayData::Complex(data),
        })
    }

    pub fn dtype(&self) -> Dtype {
        match self.data {
            ArrayData::Real(_) => Dtype::F64,
            ArrayData::Complex(_) => Dtype::C128,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(self.dtype() as u32).to_le_bytes());
        out.extend_from_slice(&(self.shape.len() as u32).to_le_bytes());
        for &s in &self.shape {
            out.extend_from_slice(&(s as u64).to_le_bytes());
        }
        match &self.data {
            ArrayData::Real(v) => {
                for x in v {
                    out.extend_from_slice(&x.to_le_bytes());
                }
            }
            ArrayData::Complex(v) => {
                for z in v {
                    out.extend_from_slice(&z.re.to_le_bytes());
                    out.extend_from_slice(&z.im.to_le_bytes());
                }
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ArrayIoError> {
        let mut cur = Cursor { b: bytes, pos: 0 };
        if cur.take(4)? != MAGIC {
            return Err(ArrayIoError::Magic);
        }
        let version = cur.u32()?;
        if version != VERSION {
            return Err(ArrayIoError::Version(version));
        }
        let dtype = cur.u32()?;
        let ndim = cur.u32()? as usize;
        let mut shape = Vec::with_capacity(ndim);
        for _ in 0..ndim {
            shape.push(cur.u64()? as usize);
        }
        let len: usize = shape.iter().product();
        match dtype {
            1 => {
                let v = (0..len).map(|_| cur.f64()).collect::<Result<_, _>>()?;
                Self::real(shape, v)
            }
            2 => {
                let v = (0..len)
                    .map(|_| Ok(Complex64::new(cur.f64()?, cur.f64()?)))
                    .collect::<Result<_, ArrayIoError>>()?;
                Self::complex(shape, v)
            }
            d => Err(ArrayIoError::Dtype(d)),
        }
    }
}

fn check_shape(shape: &[usize], len: usize) -> Result<(), ArrayIoError> {
    if shape.iter().product::<usize>() != len {
        return Err(ArrayIoError::Shape {
            shape: shape.to_vec(),
            len,
        });
    }
    Ok(())
}

struct Cursor<'a> {
    b: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], ArrayIoError> {
        let s = self
            .b
            .get(self.pos..self.pos + n)
            .ok_or(ArrayIoError::Truncated)?;
        self.pos += n;
        Ok(s)
    }
    fn u32(&mut self) -> Result<u32, ArrayIoError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64, ArrayIoError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64, ArrayIoError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}
