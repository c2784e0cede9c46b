#include <doctest.h>

#include <cmath>

#include "ffgram/spaces.hpp"

using namespace ffgram;

TEST_CASE("make_subspace orthonormalizes and keeps the ambient dimension") {
    Mat span(2, 1);
    span << Complex(2, 0), Complex(0, 0);
    Subspace s = make_subspace(span);
    CHECK(s.ambient == 2);
    CHECK(s.dim() == 1);
    CHECK(std::abs(s.basis(0, 0) - Complex(1, 0)) < 1e-14);
    CHECK_THROWS_AS(make_subspace(Mat::Zero(2, 1)), AllZeroError);
}

TEST_CASE("projection onto a complex line matches the rank-one formula") {
    Mat span(2, 1);
    span << Complex(1, 0), Complex(0, 1); // (1, i), unnormalized
    Subspace s = make_subspace(span);
    Mat p = projection(s);
    // q q^* for q = (1, i)/sqrt(2)
    Mat expected(2, 2);
    expected << Complex(0.5, 0), Complex(0, -0.5), Complex(0, 0.5), Complex(0.5, 0);
    CHECK(frobenius(p - expected) < 1e-14);
    // A projection is idempotent and self-adjoint.
    CHECK(frobenius(p * p - p) < 1e-14);
    CHECK(frobenius(p - Mat(p.adjoint())) < 1e-14);
}

TEST_CASE("embed and restrict are mutually inverse on the subspace") {
    Mat span(3, 2);
    span << Complex(1, 0), Complex(0, 0), Complex(0, 0), Complex(1, 1), Complex(1, 0),
        Complex(0, 0);
    Subspace s = make_subspace(span);
    Vec c(2);
    c << Complex(0.3, -0.2), Complex(1.5, 0.25);
    Vec x = embed(s, c);
    Vec back = restrict_to(s, x);
    CHECK((back - c).norm() < 1e-14);
}

TEST_CASE("restriction of an orthogonal vector vanishes") {
    Mat span(2, 1);
    span << Complex(1, 0), Complex(0, 0);
    Subspace s = make_subspace(span);
    Vec y(2);
    y << Complex(0, 0), Complex(2, 1);
    CHECK(restrict_to(s, y).norm() < 1e-15);
}

TEST_CASE("direct sum bookkeeping: offsets and totals") {
    DirectSumSpace d({2, 3, 1});
    CHECK(d.blocks() == 3);
    CHECK(d.total == 6);
    REQUIRE(d.offsets.size() == 3);
    CHECK(d.offsets[0] == 0);
    CHECK(d.offsets[1] == 2);
    CHECK(d.offsets[2] == 5);
    CHECK(d == DirectSumSpace({2, 3, 1}));
    CHECK_FALSE(d == DirectSumSpace({2, 4}));
}

TEST_CASE("block views address the right tile of the dense matrix") {
    BlockOperator op(DirectSumSpace({1, 2}), DirectSumSpace({2, 1}));
    CHECK(op.matrix.rows() == 3);
    CHECK(op.matrix.cols() == 3);
    op.block(0, 1) << Complex(1, 0), Complex(2, 0), Complex(3, 0), Complex(4, 0);
    // Tile (0, 1): codomain block 0 (rows 0..1), domain block 1 (cols 1..2).
    CHECK(op.matrix(0, 1) == Complex(1, 0));
    CHECK(op.matrix(0, 2) == Complex(2, 0));
    CHECK(op.matrix(1, 1) == Complex(3, 0));
    CHECK(op.matrix(1, 2) == Complex(4, 0));
    CHECK(op.matrix(0, 0) == Complex(0, 0));

    const BlockOperator& cref = op;
    CHECK(cref.block(0, 1).rows() == 2);
    CHECK(cref.block(0, 1).cols() == 2);
    CHECK(cref.block(1, 0).rows() == 1);
    CHECK(cref.block(1, 0).cols() == 1);
}

TEST_CASE("apply_block agrees with the dense product") {
    BlockOperator op(DirectSumSpace({2}), DirectSumSpace({2}));
    op.matrix << Complex(1, 0), Complex(0, 1), Complex(0, -1), Complex(2, 0);
    Vec x(2);
    x << Complex(1, 1), Complex(-0.5, 0);
    Vec direct = op.matrix * x;
    CHECK((apply_block(op, x) - direct).norm() < 1e-15);
}
