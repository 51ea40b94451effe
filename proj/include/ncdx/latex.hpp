#pragma once

#include <string>

#include "ncdx/airy.hpp"
#include "ncdx/oreop.hpp"
#include "ncdx/rank1.hpp"
#include "ncdx/report.hpp"

namespace ncdx {

std::string latex_ratfunc(const RatFunc &f);
std::string latex_mat(const Mat &m);
std::string latex_op(const OreOp &p);
std::string latex_report(const VerificationReport &r);

/// Complete compilable documents for the bundle outputs.
std::string latex_document_rank1(const Rank1Bundle &b);
std::string latex_document_airy(const AiryBundle &b);
/// Generic wrapper used for the remaining job kinds.
std::string latex_document(const std::string &title, const std::string &body);

} // namespace ncdx
