#pragma once

#define CONVLAB_VERSION "0.1.0"
