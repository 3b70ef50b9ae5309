//! Small fixed-size vector types.

use std::ops::{Add, AddAssign, Div, Index, Mul, Neg, Sub};

use crate::scalar::{cast, Real};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2<S> {
    pub x: S,
    pub y: S,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3<S> {
    pub x: S,
    pub y: S,
    pub z: S,
}

impl<S: Real> Vec2<S> {
    #[inline]
    pub fn new(x: S, y: S) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn zero() -> Self {
        Self::new(S::zero(), S::zero())
    }

    /// z component of the 3D cross product.
    #[inline]
    pub fn cross(self, o: Self) -> S {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn dot(self, o: Self) -> S {
        self.x * o.x + self.y * o.y
    }

    pub fn cast<T: Real>(self) -> Vec2<T> {
        Vec2::new(cast(self.x), cast(self.y))
    }
}

impl<S: Real> Vec3<S> {
    #[inline]
    pub fn new(x: S, y: S, z: S) -> Self {
        Self { x, y, z }
    }

    #[inline]
    pub fn zero() -> Self {
        Self::new(S::zero(), S::zero(), S::zero())
    }

    #[inline]
    pub fn splat(v: S) -> Self {
        Self::new(v, v, v)
    }

    #[inline]
    pub fn dot(self, o: Self) -> S {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    #[inline]
    pub fn norm_squared(self) -> S {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> S {
        self.norm_squared().sqrt()
    }

    /// Unit vector in the same direction, or `None` for a (near) zero vector.
    #[inline]
    pub fn try_normalize(self) -> Option<Self> {
        let n = self.norm();
        if n > S::min_positive_value() && n.is_finite() {
            Some(self / n)
        } else {
            None
        }
    }

    #[inline]
    pub fn normalize(self) -> Self {
        self / self.norm()
    }

    #[inline]
    pub fn min(self, o: Self) -> Self {
        Self::new(self.x.min(o.x), self.y.min(o.y), self.z.min(o.z))
    }

    #[inline]
    pub fn max(self, o: Self) -> Self {
        Self::new(self.x.max(o.x), self.y.max(o.y), self.z.max(o.z))
    }

    #[inline]
    pub fn max_component(self) -> S {
        self.x.max(self.y).max(self.z)
    }

    pub fn to_array(self) -> [S; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [S; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn cast<T: Real>(self) -> Vec3<T> {
        Vec3::new(cast(self.x), cast(self.y), cast(self.z))
    }
}

macro_rules! impl_ops {
    ($t:ident { $($f:ident),+ }) => {
        impl<S: Real> Add for $t<S> {
            type Output = Self;
            #[inline]
            fn add(self, o: Self) -> Self { $t { $($f: self.$f + o.$f),+ } }
        }
        impl<S: Real> AddAssign for $t<S> {
            #[inline]
            fn add_assign(&mut self, o: Self) { $(self.$f += o.$f;)+ }
        }
        impl<S: Real> Sub for $t<S> {
            type Output = Self;
            #[inline]
            fn sub(self, o: Self) -> Self { $t { $($f: self.$f - o.$f),+ } }
        }
        impl<S: Real> Mul<S> for $t<S> {
            type Output = Self;
            #[inline]
            fn mul(self, s: S) -> Self { $t { $($f: self.$f * s),+ } }
        }
        impl<S: Real> Div<S> for $t<S> {
            type Output = Self;
            #[inline]
            fn div(self, s: S) -> Self { $t { $($f: self.$f / s),+ } }
        }
        impl<S: Real> Neg for $t<S> {
            type Output = Self;
            #[inline]
            fn neg(self) -> Self { $t { $($f: -self.$f),+ } }
        }
    };
}

impl_ops!(Vec2 { x, y });
impl_ops!(Vec3 { x, y, z });

impl<S> Index<usize> for Vec3<S> {
    type Output = S;
    fn index(&self, i: usize) -> &S {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("Vec3 index {i} out of range"),
        }
    }
}
