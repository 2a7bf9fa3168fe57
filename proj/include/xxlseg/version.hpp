#pragma once

#define XXLSEG_VERSION "0.3.0"
