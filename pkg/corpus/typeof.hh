% Type assignment for an encoded simply-typed lambda-calculus.
kind ty type.
kind tm type.

type b ty.
type arr ty -> ty -> ty.
type app tm -> tm -> tm.
type abs ty -> (tm -> tm) -> tm.
type typeof tm -> ty -> o.

typeof M1 (arr T1 T2) => typeof M2 T1 => typeof (app M1 M2) T2.
(pi x \ typeof x T1 => typeof (M x) T2) => typeof (abs T1 M) (arr T1 T2).
